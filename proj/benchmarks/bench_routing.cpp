#include <benchmark/benchmark.h>

#include <memory>

#include "psvr/simulator.hpp"
#include "psvr/sweep.hpp"

using namespace psvr;

static void BM_RingBuild(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Graph g = generate_er(n, 0.1, 42);
  const SpanningTree tree = build_tree(g, central_node(g));
  for (auto _ : state) {
    auto ring = VirtualRing::build(tree, g);
    benchmark::DoNotOptimize(ring.length());
  }
}
BENCHMARK(BM_RingBuild)->Arg(50)->Arg(100)->Arg(400);

static void BM_HandlePub(benchmark::State& state) {
  const std::size_t n = 100;
  const Graph g = generate_er(n, 0.1, 7);
  auto ring = std::make_shared<const VirtualRing>(VirtualRing::build(build_tree(g, central_node(g)), g));
  const auto timings = LeaseTimings::defaults_for(ring->length(), 1);
  PsvrNode node(NodeId{0}, ring, {}, 1, timings, 0);
  for (std::uint32_t v = 1; v < n; v += 5) node.upd_sn(0, ring->positions_of(NodeId{v}), 0);
  const Payload data(32, 0xab);
  const PubMeta meta{NodeId{0}, 0, 0};
  for (auto _ : state) {
    auto out = node.publish(0, data, meta);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_HandlePub);

static void BM_Simulate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Scenario sc;
  sc.topology = GeneratedTopology{n, 0.2};
  for (std::uint32_t v = 0; v < n; v += 4) sc.subscriptions.push_back({0, NodeId{v}, true, 0});
  const Tick lease = LeaseTimings::defaults_for(2 * (n - 1), 1).lease_period;
  sc.schedule = PublicationSchedule{lease / 2, 5, 2 * lease, {}, 0, 16};
  sc.duration = 2 * lease;
  std::size_t publications = 0;
  for (auto _ : state) {
    const auto ledger = simulate(sc);
    publications += ledger.publications().size();
  }
  state.counters["pubs/s"] = benchmark::Counter(static_cast<double>(publications), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Simulate)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_Instance(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto r = run_instance(50, 0.2, 10, seed++);
    benchmark::DoNotOptimize(r.psvr_tx);
  }
}
BENCHMARK(BM_Instance)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
