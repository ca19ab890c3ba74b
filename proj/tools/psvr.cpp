#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "psvr/baselines.hpp"
#include "psvr/errors.hpp"
#include "psvr/metrics.hpp"
#include "psvr/scenario.hpp"
#include "psvr/simulator.hpp"
#include "psvr/sweep.hpp"

namespace fs = std::filesystem;
using namespace psvr;

namespace {

struct Options {
  std::size_t nodes = 30;
  double edge_prob = 0.15;
  std::size_t subscribers = 5;
  std::size_t channels = 1;
  std::optional<double> loss;
  std::uint64_t seed = 1;
  std::optional<Tick> duration;
  std::optional<Tick> delta_s;
  std::string scenario;
  std::optional<std::string> baseline;
  std::string out;
  std::size_t degree_cap = 0;
  std::string graph;
  std::optional<std::uint32_t> root;
  Tick window = 0;
  std::size_t seeds = 10;
  std::size_t threads = 0;
  std::string ledger;
  std::vector<std::size_t> sweep_nodes{25, 50, 100};
  std::vector<double> sweep_probs{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<std::size_t> sweep_subs{10, 20};
};

/// Writes to `<out>/<name>` when an output directory was given, else to stdout.
class Sink {
 public:
  Sink(const std::string& dir, const std::string& name) {
    if (dir.empty()) return;
    fs::create_directories(dir);
    path_ = fs::path(dir) / name;
    file_.open(path_);
    if (!file_) throw Error("cannot write " + path_.string());
  }
  std::ostream& stream() { return path_.empty() ? std::cout : file_; }
  void announce() const {
    if (!path_.empty()) std::cerr << "wrote " << path_.string() << '\n';
  }

 private:
  fs::path path_;
  std::ofstream file_;
};

Graph load_or_generate(const Options& o) {
  if (!o.graph.empty()) {
    std::ifstream in(o.graph);
    if (!in) throw ValidationError("--graph", "cannot open " + o.graph);
    return read_graph(in);
  }
  return generate_er(o.nodes, o.edge_prob, o.seed);
}

Baseline parse_baseline(const std::string& text) {
  auto b = baseline_from_string(text);
  if (!b) throw ValidationError("--baseline", "expected ring, td, ts or shen");
  return *b;
}

int cmd_gen(const Options& o) {
  Graph g = generate_er(o.nodes, o.edge_prob, o.seed);
  if (o.degree_cap) g = select_links(g, o.degree_cap, o.seed).kept;
  Sink sink(o.out, "graph.txt");
  write_graph(sink.stream(), g);
  sink.announce();
  return 0;
}

int cmd_ring(const Options& o) {
  const Graph g = load_or_generate(o);
  const LinkSelection links = o.degree_cap ? select_links(g, o.degree_cap, o.seed) : keep_all_links(g);
  if (o.root && *o.root >= g.node_count()) throw ValidationError("--root", "node does not exist");
  const NodeId root = o.root ? NodeId{*o.root} : central_node(links.kept);
  const SpanningTree tree = build_tree(links.kept, root);
  const auto ring = VirtualRing::build(tree, links.kept);
  Sink sink(o.out, "ring.txt");
  ring.dump(sink.stream());
  sink.announce();
  return 0;
}

Scenario generated_scenario(const Options& o) {
  if (o.subscribers > o.nodes) throw ValidationError("--subscribers", "more subscribers than nodes");
  Scenario sc;
  sc.topology = GeneratedTopology{o.nodes, o.edge_prob};
  sc.seed = o.seed;
  sc.channels = o.channels;
  sc.degree_cap = o.degree_cap;
  if (o.root) sc.root = NodeId{*o.root};

  const Tick lease = LeaseTimings::defaults_for(2 * (o.nodes - 1), 1).lease_period;
  sc.duration = o.duration.value_or(4 * lease);
  std::mt19937_64 rng(o.seed);
  std::vector<NodeId> order;
  for (std::uint32_t v = 0; v < o.nodes; ++v) order.emplace_back(v);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < o.subscribers; ++i) {
    sc.subscriptions.push_back({0, order[i], true, static_cast<ChannelId>(i % o.channels)});
  }
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(o.nodes - 1));
  const Tick period = std::max<Tick>(lease / 8, 1);
  std::size_t k = 0;
  for (Tick t = lease / 2; t < sc.duration; t += period, ++k) {
    sc.publications.push_back({t, NodeId{pick(rng)}, static_cast<ChannelId>(k % o.channels), 16});
  }
  return sc;
}

std::size_t analytic_tx(Baseline baseline, const Instance& inst, NodeId publisher, const std::vector<NodeId>& subs) {
  switch (baseline) {
    case Baseline::kNaiveRing:
      return route_naive_ring(*inst.ring, publisher, subs).transmissions;
    case Baseline::kTd:
      return route_td(inst.links.kept, publisher, subs).transmissions;
    case Baseline::kTs:
      return route_ts(inst.tree, publisher, subs).transmissions;
    case Baseline::kShen:
      break;
  }
  throw Error("tree baseline needs a simulation");
}

void write_gain(std::ostream& out, Baseline baseline, const TraceLedger& ledger, const Simulator& sim,
                const std::optional<TraceLedger>& shen) {
  out << "pub_id,psvr_tx,baseline,baseline_tx,gain_percent\n";
  for (const auto& rec : ledger.publications()) {
    std::size_t a = 0;
    if (shen) {
      a = shen->publications().at(rec.id).transmissions;
    } else {
      std::vector<NodeId> subs;
      for (NodeId v : rec.expected) subs.push_back(*sim.slot_of(v));
      a = analytic_tx(baseline, sim.instance(), *sim.slot_of(rec.origin), subs);
    }
    out << rec.id << ',' << rec.transmissions << ',' << to_string(baseline) << ',' << a << ','
        << (a ? format_fixed(gain(rec.transmissions, a)) : "") << '\n';
  }
}

void write_report(const TraceLedger& ledger, const std::string& out, Tick window) {
  {
    Sink sink(out, "summary.csv");
    ledger.write_summary_csv(sink.stream());
    sink.announce();
  }
  if (out.empty()) return;
  {
    Sink sink(out, "hops.csv");
    const auto h = hop_histogram(ledger);
    sink.stream() << "hops,count\n";
    for (std::size_t i = 1; i < h.counts.size(); ++i) sink.stream() << i << ',' << h.counts[i] << '\n';
    sink.stream() << "mean," << format_fixed(h.mean) << '\n';
    sink.announce();
  }
  if (window > 0 && !ledger.publications().empty()) {
    Sink sink(out, "ratio.csv");
    sink.stream() << "start,end,expected,delivered,percent,disturbed\n";
    for (const auto& w : delivery_ratio(ledger, window)) {
      sink.stream() << w.start << ',' << w.end << ',' << w.expected << ',' << w.delivered << ','
                    << (w.percent ? format_fixed(*w.percent) : "") << ',' << (w.disturbed ? 1 : 0) << '\n';
    }
    sink.announce();
  }
}

int cmd_run(const Options& o) {
  Scenario sc = o.scenario.empty() ? generated_scenario(o) : Scenario::load(o.scenario);
  if (o.loss) sc.loss = *o.loss;
  if (o.duration && !o.scenario.empty()) sc.duration = *o.duration;
  if (o.delta_s) sc.delta_s = *o.delta_s;
  if (!o.scenario.empty() && o.seed != 1) sc.seed = o.seed;
  std::optional<Baseline> baseline;
  if (o.baseline) baseline = parse_baseline(*o.baseline);

  Simulator sim(sc);
  sim.run();
  const TraceLedger& ledger = sim.ledger();

  std::size_t exact = 0;
  std::size_t tx = 0;
  for (const auto& rec : ledger.publications()) {
    exact += rec.exactly_once() ? 1 : 0;
    tx += rec.transmissions;
  }
  const auto hist = hop_histogram(ledger);
  std::cout << "nodes " << sim.base().node_count() << ", ring length " << sim.instance().ring->length()
            << ", lease period " << sim.timings().lease_period << '\n'
            << "publications " << ledger.publications().size() << ", exactly-once " << exact << ", pub tx " << tx
            << ", sub tx " << ledger.sub_transmissions() << ", mean hops " << format_fixed(hist.mean) << '\n';

  if (!o.out.empty()) {
    fs::create_directories(o.out);
    std::ofstream jsonl(fs::path(o.out) / "ledger.jsonl");
    ledger.write_jsonl(jsonl);
    std::ofstream(fs::path(o.out) / "scenario.json") << sc.to_json() << '\n';
    std::cerr << "wrote " << (fs::path(o.out) / "ledger.jsonl").string() << '\n';
    write_report(ledger, o.out, o.window > 0 ? o.window : sim.timings().lease_period / 2);
  }
  if (baseline) {
    const Baseline chosen = *baseline;
    std::optional<TraceLedger> shen;
    if (chosen == Baseline::kShen) {
      Scenario tree_sc = sc;
      tree_sc.protocol = Protocol::kShen;
      shen = simulate(tree_sc);
    }
    Sink sink(o.out, "gain.csv");
    write_gain(sink.stream(), chosen, ledger, sim, shen);
    sink.announce();
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  SweepGrid grid{o.sweep_nodes, o.sweep_probs, o.sweep_subs, o.seeds, o.seed, o.threads};
  const std::optional<Baseline> only = o.baseline ? std::optional(parse_baseline(*o.baseline)) : std::nullopt;
  const SweepResult result = sweep(grid);
  if (!o.out.empty()) {
    Sink instances(o.out, "instances.csv");
    write_instances_csv(instances.stream(), result);
    instances.announce();
  }
  Sink cells(o.out, "cells.csv");
  write_cells_csv(cells.stream(), result, only);
  cells.announce();
  return 0;
}

int cmd_report(const Options& o) {
  std::ifstream in(o.ledger);
  if (!in) throw ValidationError("--ledger", "cannot open " + o.ledger);
  const TraceLedger ledger = TraceLedger::read_jsonl(in);
  if (o.window < 0) throw ValidationError("--window", "must be positive");
  write_report(ledger, o.out, o.window);
  if (o.out.empty()) {
    const auto h = hop_histogram(ledger);
    std::cout << "deliveries " << h.total << ", mean hops " << format_fixed(h.mean) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Publish/subscribe routing on a virtual ring: topology, simulation and sweeps"};
  app.require_subcommand(1);
  Options o;

  auto add_topology = [&o](CLI::App* sub) {
    sub->add_option("--nodes", o.nodes, "Number of nodes")->check(CLI::Range(2, 65535));
    sub->add_option("--edge-prob", o.edge_prob, "G(n,p) edge probability")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--degree-cap", o.degree_cap, "Maximum kept degree (0 keeps every edge)");
    sub->add_option("--out", o.out, "Output directory (stdout when omitted)");
  };

  auto* gen = app.add_subcommand("gen", "Sample a connected G(n,p) topology");
  add_topology(gen);

  auto* ring = app.add_subcommand("ring", "Build and dump the virtual ring");
  add_topology(ring);
  ring->add_option("--graph", o.graph, "Graph file instead of a generated topology")->check(CLI::ExistingFile);
  ring->add_option("--root", o.root, "Tree root (default: most central node)");

  auto* run = app.add_subcommand("run", "Simulate a scenario file or a generated one");
  add_topology(run);
  run->add_option("--scenario", o.scenario, "Scenario JSON")->check(CLI::ExistingFile);
  run->add_option("--subscribers", o.subscribers, "Subscribers of a generated scenario");
  run->add_option("--channels", o.channels, "Channels of a generated scenario")->check(CLI::Range(1, 256));
  run->add_option("--loss", o.loss, "Per-transmission loss probability")->check(CLI::Range(0.0, 1.0));
  run->add_option("--duration", o.duration, "Simulated ticks");
  run->add_option("--delta-s", o.delta_s, "Lease period override");
  run->add_option("--root", o.root, "Tree root");
  run->add_option("--window", o.window, "Delivery-ratio window (default half a lease period)");
  run->add_option("--baseline", o.baseline, "Also report gain against ring, td, ts or shen");

  auto* sw = app.add_subcommand("sweep", "Gain statistics over a grid of random instances");
  sw->add_option("--nodes", o.sweep_nodes, "Node counts")->delimiter(',');
  sw->add_option("--edge-prob", o.sweep_probs, "Edge probabilities")->delimiter(',');
  sw->add_option("--subscribers", o.sweep_subs, "Subscriber counts")->delimiter(',');
  sw->add_option("--seeds", o.seeds, "Instances per cell")->check(CLI::PositiveNumber);
  sw->add_option("--seed", o.seed, "Base seed");
  sw->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  sw->add_option("--baseline", o.baseline, "Restrict the cell table to one baseline");
  sw->add_option("--out", o.out, "Output directory (stdout when omitted)");

  auto* report = app.add_subcommand("report", "Summaries from a recorded ledger");
  report->add_option("--ledger", o.ledger, "ledger.jsonl written by run")->required()->check(CLI::ExistingFile);
  report->add_option("--window", o.window, "Delivery-ratio window");
  report->add_option("--out", o.out, "Output directory (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(o);
    if (ring->parsed()) return cmd_ring(o);
    if (run->parsed()) return cmd_run(o);
    if (sw->parsed()) return cmd_sweep(o);
    return cmd_report(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const GenerationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const SelectionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
