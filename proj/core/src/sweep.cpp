#include "psvr/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "psvr/baselines.hpp"
#include "psvr/errors.hpp"
#include "psvr/simulator.hpp"

namespace psvr {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t instance_seed(std::uint64_t base, std::size_t n, std::size_t p_index, std::size_t s, std::size_t k) {
  std::uint64_t h = splitmix(base);
  h = splitmix(h ^ n);
  h = splitmix(h ^ p_index);
  h = splitmix(h ^ s);
  return splitmix(h ^ k);
}

double mean_hops(const PublicationRecord& rec) {
  if (rec.deliveries.empty()) return 0.0;
  double total = 0;
  for (const auto& d : rec.deliveries) total += d.hops;
  return total / static_cast<double>(rec.deliveries.size());
}

}  // namespace

std::string to_string(Baseline b) {
  switch (b) {
    case Baseline::kNaiveRing:
      return "ring";
    case Baseline::kTd:
      return "td";
    case Baseline::kTs:
      return "ts";
    case Baseline::kShen:
      return "shen";
  }
  return "?";
}

std::optional<Baseline> baseline_from_string(const std::string& text) {
  for (Baseline b : kAllBaselines) {
    if (to_string(b) == text) return b;
  }
  return std::nullopt;
}

InstanceOutcome run_instance(std::size_t nodes, double edge_prob, std::size_t subscribers, std::uint64_t seed) {
  InstanceOutcome out;
  out.nodes = nodes;
  out.edge_prob = edge_prob;
  out.subscribers = subscribers;
  out.seed = seed;
  if (subscribers > nodes) {
    out.note = "more subscribers than nodes";
    return out;
  }

  std::optional<Graph> graph;
  try {
    graph.emplace(generate_er(nodes, edge_prob, seed));
  } catch (const GenerationError& e) {
    out.note = e.what();
    return out;
  }

  std::mt19937_64 rng(splitmix(seed));
  std::vector<NodeId> order(nodes);
  for (std::uint32_t v = 0; v < nodes; ++v) order[v] = NodeId{v};
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<NodeId> subs(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(subscribers));
  std::sort(subs.begin(), subs.end());
  const NodeId publisher{std::uniform_int_distribution<std::uint32_t>(0, static_cast<std::uint32_t>(nodes - 1))(rng)};

  Scenario sc;
  sc.topology = ExplicitTopology{nodes, {graph->edges().begin(), graph->edges().end()}};
  sc.seed = seed;
  for (NodeId v : subs) sc.subscriptions.push_back({0, v, true, 0});
  // Subscriptions settle within the tree height; half a lease period is ample.
  const Tick publish_at = LeaseTimings::defaults_for(2 * (nodes - 1), 1).lease_period / 2;
  sc.publications.push_back({publish_at, publisher, 0, 0});
  sc.duration = publish_at;

  Simulator ring_sim(sc);
  ring_sim.run();
  const auto& rec = ring_sim.ledger().publications().at(0);
  out.ring_length = ring_sim.instance().ring->length();
  out.psvr_tx = rec.transmissions;
  out.psvr_hops = mean_hops(rec);
  out.psvr_exactly_once = rec.exactly_once();

  sc.protocol = Protocol::kShen;
  Simulator tree_sim(sc);
  tree_sim.run();
  const auto& tree_rec = tree_sim.ledger().publications().at(0);
  out.shen_exactly_once = tree_rec.exactly_once();
  out.baseline_tx[static_cast<int>(Baseline::kShen)] = tree_rec.transmissions;
  out.baseline_hops[static_cast<int>(Baseline::kShen)] = mean_hops(tree_rec);

  const auto naive = route_naive_ring(*ring_sim.instance().ring, publisher, subs);
  const auto td = route_td(*graph, publisher, subs);
  const auto ts = route_ts(ring_sim.instance().tree, publisher, subs);
  out.baseline_tx[static_cast<int>(Baseline::kNaiveRing)] = naive.transmissions;
  out.baseline_hops[static_cast<int>(Baseline::kNaiveRing)] = naive.mean_hops();
  out.baseline_tx[static_cast<int>(Baseline::kTd)] = td.transmissions;
  out.baseline_hops[static_cast<int>(Baseline::kTd)] = td.mean_hops();
  out.baseline_tx[static_cast<int>(Baseline::kTs)] = ts.transmissions;
  out.baseline_hops[static_cast<int>(Baseline::kTs)] = ts.mean_hops();
  out.ok = true;
  return out;
}

CellSummary summarize_cell(const std::vector<const InstanceOutcome*>& instances, Baseline baseline) {
  CellSummary cell;
  cell.baseline = baseline;
  if (!instances.empty()) {
    cell.nodes = instances.front()->nodes;
    cell.edge_prob = instances.front()->edge_prob;
    cell.subscribers = instances.front()->subscribers;
  }
  std::vector<double> gains;
  double psvr_hops = 0;
  double base_hops = 0;
  for (const auto* inst : instances) {
    if (!inst->ok || inst->tx(baseline) == 0) {
      ++cell.skipped;
      continue;
    }
    gains.push_back(gain(inst->psvr_tx, inst->tx(baseline)));
    psvr_hops += inst->psvr_hops;
    base_hops += inst->hops(baseline);
  }
  cell.gain = summarize(gains);
  if (!gains.empty()) {
    cell.psvr_hops = psvr_hops / static_cast<double>(gains.size());
    cell.baseline_hops = base_hops / static_cast<double>(gains.size());
  }
  return cell;
}

SweepResult sweep(const SweepGrid& grid) {
  struct Task {
    std::size_t n;
    std::size_t p_index;
    std::size_t s;
    std::size_t k;
  };
  std::vector<Task> tasks;
  for (std::size_t n : grid.nodes) {
    for (std::size_t pi = 0; pi < grid.edge_probs.size(); ++pi) {
      for (std::size_t s : grid.subscribers) {
        for (std::size_t k = 0; k < grid.seeds; ++k) tasks.push_back({n, pi, s, k});
      }
    }
  }

  SweepResult result;
  result.instances.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      result.instances[i] = run_instance(t.n, grid.edge_probs[t.p_index], t.s,
                                         instance_seed(grid.base_seed, t.n, t.p_index, t.s, t.k));
    }
  };
  std::size_t threads = grid.threads ? grid.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(tasks.size(), 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t begin = 0; begin < tasks.size(); begin += grid.seeds) {
    std::vector<const InstanceOutcome*> cell;
    for (std::size_t i = begin; i < begin + grid.seeds; ++i) cell.push_back(&result.instances[i]);
    for (Baseline b : kAllBaselines) result.cells.push_back(summarize_cell(cell, b));
  }
  return result;
}

void write_instances_csv(std::ostream& out, const SweepResult& result) {
  out << "nodes,edge_prob,subscribers,seed,ok,ring_length,psvr_tx,ring_tx,td_tx,ts_tx,shen_tx,"
         "psvr_hops,td_hops,ts_hops,shen_hops,note\n";
  for (const auto& r : result.instances) {
    out << r.nodes << ',' << format_fixed(r.edge_prob, 3) << ',' << r.subscribers << ',' << r.seed << ','
        << (r.ok ? 1 : 0) << ',' << r.ring_length << ',' << r.psvr_tx << ',' << r.tx(Baseline::kNaiveRing) << ','
        << r.tx(Baseline::kTd) << ',' << r.tx(Baseline::kTs) << ',' << r.tx(Baseline::kShen) << ','
        << format_fixed(r.psvr_hops, 3) << ',' << format_fixed(r.hops(Baseline::kTd), 3) << ','
        << format_fixed(r.hops(Baseline::kTs), 3) << ',' << format_fixed(r.hops(Baseline::kShen), 3) << ','
        << r.note << '\n';
  }
}

void write_cells_csv(std::ostream& out, const SweepResult& result, std::optional<Baseline> only) {
  out << "nodes,edge_prob,subscribers,baseline,instances,skipped,gain_mean,gain_median,gain_q1,gain_q3,"
         "psvr_hops,baseline_hops\n";
  for (const auto& c : result.cells) {
    if (only && c.baseline != *only) continue;
    out << c.nodes << ',' << format_fixed(c.edge_prob, 3) << ',' << c.subscribers << ',' << to_string(c.baseline)
        << ',' << c.gain.count << ',' << c.skipped << ',' << format_fixed(c.gain.mean) << ','
        << format_fixed(c.gain.median) << ',' << format_fixed(c.gain.q1) << ',' << format_fixed(c.gain.q3) << ','
        << format_fixed(c.psvr_hops, 3) << ',' << format_fixed(c.baseline_hops, 3) << '\n';
  }
}

}  // namespace psvr
