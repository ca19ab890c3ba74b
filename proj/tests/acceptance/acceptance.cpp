// Acceptance checks, one per numbered criterion. Prints one PASS/FAIL line
// per criterion and exits non-zero when any selected criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "psvr/errors.hpp"
#include "psvr/metrics.hpp"
#include "psvr/simulator.hpp"
#include "psvr/sweep.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

using namespace psvr;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  Verdict verdict(std::string summary) const {
    Verdict v{failed_ == 0, std::move(summary)};
    if (failed_) {
      v.detail += "; " + std::to_string(failed_) + " violation(s), first: " + failures_.front();
    }
    return v;
  }

 private:
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> send_log(const TraceLedger& ledger, std::uint32_t pub) {
  std::vector<std::string> out;
  for (const auto& e : ledger.events()) {
    if (e.kind == EventKind::kSend && e.value == pub) out.push_back(e.detail);
  }
  return out;
}

Graph sample_graph(std::size_t& n, double& p, std::mt19937_64& rng, std::size_t& resamples) {
  for (;;) {
    try {
      return generate_er(n, p, rng());
    } catch (const GenerationError&) {
      ++resamples;
      p = std::min(0.5, p + 0.02);
    }
  }
}

// ---------------------------------------------------------------------------

Verdict criterion1() {
  const auto start = Clock::now();
  const auto ring = VirtualRing::build(fixtures::six_node_tree(), fixtures::six_node_graph());
  Check check;
  const std::vector<NodeId> want{fixtures::kR, fixtures::kE, fixtures::kC, fixtures::kA, fixtures::kC,
                                 fixtures::kE, fixtures::kD, fixtures::kB, fixtures::kD, fixtures::kE};
  check.require(std::equal(want.begin(), want.end(), ring.sequence().begin(), ring.sequence().end()),
                "sequence differs");
  check.require(ring.length() == 10, "length " + std::to_string(ring.length()));
  std::set<std::pair<std::uint32_t, std::uint32_t>> links;
  for (std::uint32_t p = 0; p < ring.length(); ++p) {
    for (Position q : ring.shortcuts_from(Position{p})) links.emplace(p, q.value());
  }
  const std::set<std::pair<std::uint32_t, std::uint32_t>> expected{{2, 6}, {2, 8}, {4, 6}, {4, 8},
                                                                   {6, 2}, {6, 4}, {8, 2}, {8, 4}};
  check.require(links == expected, "shortcut set differs");
  const double secs = seconds_since(start);
  check.require(secs < 1.0, "took " + format_fixed(secs, 3) + " s");
  return check.verdict("six-node ring r e c a c e d b d e, l = 10, shortcuts {2,4} x {6,8}");
}

Verdict criterion2() {
  const auto start = Clock::now();
  Scenario sc = fixtures::eleven_node_scenario();
  sc.publications.push_back({30, fixtures::kPubA, 0, 0});
  sc.trace = true;
  const TraceLedger ledger = simulate(sc);
  Check check;
  const auto& rec = ledger.publications().at(0);
  auto sends = send_log(ledger, 0);
  std::vector<std::string> want{"1>2/3", "3>4/7", "7>13/1", "4>5/6", "13>14/1", "14>15/0", "15>16/19"};
  std::sort(sends.begin(), sends.end());
  std::sort(want.begin(), want.end());
  check.require(sends == want, "forwarding schedule differs");
  check.require(rec.transmissions == 7, std::to_string(rec.transmissions) + " transmissions");
  check.require(rec.delivered() == 3 && rec.exactly_once(), "deliveries not exactly once to 3 subscribers");
  const double secs = seconds_since(start);
  check.require(secs < 1.0, "took " + format_fixed(secs, 3) + " s");
  return check.verdict("eleven-node publication: " + std::to_string(rec.transmissions) + " transmissions, " +
                       std::to_string(rec.delivered()) + " deliveries");
}

Verdict criterion3() {
  Simulator sim(fixtures::six_node_scenario());
  sim.run_until(20);
  const VirtualRing& ring = *sim.instance().ring;
  const std::map<std::uint32_t, std::uint32_t> ns{{0, 2}, {1, 2}, {2, 3}, {3, 4}, {4, 7},
                                                  {5, 7}, {6, 7}, {7, 2}, {8, 2}, {9, 2}};
  const std::map<std::uint32_t, std::uint32_t> goal{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 6},
                                                    {5, 6}, {6, 7}, {7, 8}, {8, 2}, {9, 0}};
  Check check;
  for (std::uint32_t v = 0; v < 6; ++v) {
    const auto& node = sim.psvr(NodeId{v});
    for (std::size_t j = 0; j < node.positions().size(); ++j) {
      const Position p = node.positions()[j];
      const Position next = node.table().at(0, j).next_subscriber;
      const Position g = get_pos_closest_to(ring, p, next);
      check.require(next.value() == ns.at(p.value()), "ns(" + std::to_string(p.value()) + ") = " +
                                                          std::to_string(next.value()));
      check.require(g.value() == goal.at(p.value()), "goal(" + std::to_string(p.value()) + ") = " +
                                                         std::to_string(g.value()));
    }
  }
  return check.verdict("next-subscriber and goal rows for subscribers a, b, c");
}

struct SuiteStats {
  std::size_t scenarios = 0;
  std::size_t resamples = 0;
  std::size_t publications = 0;
  std::size_t strict_cases = 0;
  double seconds = 0;
  Check exactly_once;
  Check ring_bound;
};

const SuiteStats& random_suite() {
  static const SuiteStats stats = [] {
    SuiteStats s;
    const auto start = Clock::now();
    std::mt19937_64 rng(20240501);
    for (int k = 0; k < 500; ++k) {
      std::size_t n = std::uniform_int_distribution<std::size_t>(5, 60)(rng);
      double p = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
      const std::size_t subs = std::uniform_int_distribution<std::size_t>(1, n)(rng);
      const Graph g = sample_graph(n, p, rng, s.resamples);

      Scenario sc;
      sc.topology = ExplicitTopology{n, {g.edges().begin(), g.edges().end()}};
      sc.seed = rng();
      std::vector<NodeId> order;
      for (std::uint32_t v = 0; v < n; ++v) order.emplace_back(v);
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t i = 0; i < subs; ++i) sc.subscriptions.push_back({0, order[i], true, 0});
      const Tick lease = LeaseTimings::defaults_for(2 * (n - 1), 1).lease_period;
      std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
      for (int i = 0; i < 5; ++i) sc.publications.push_back({lease / 2 + 3 * i, NodeId{pick(rng)}, 0, 8});
      sc.duration = lease;

      Simulator sim(sc);
      sim.run();
      ++s.scenarios;
      const std::size_t l = sim.instance().ring->length();
      const std::string tag = "scenario " + std::to_string(k) + " (n=" + std::to_string(n) + ")";
      for (const auto& rec : sim.ledger().publications()) {
        ++s.publications;
        s.exactly_once.require(rec.exactly_once(), tag + " pub " + std::to_string(rec.id) + " not exactly once");
        s.exactly_once.require(rec.skips == 0, tag + " pub " + std::to_string(rec.id) + " skipped a subscriber");
        s.ring_bound.require(rec.transmissions <= l, tag + " exceeded l");
        const bool has_non_subscriber = subs < n;
        if (has_non_subscriber) {
          ++s.strict_cases;
          s.ring_bound.require(rec.transmissions < l, tag + " used l transmissions");
        }
      }
    }
    s.seconds = seconds_since(start);
    s.exactly_once.require(s.seconds < 300, "suite took " + format_fixed(s.seconds, 1) + " s");
    return s;
  }();
  return stats;
}

Verdict criterion4() {
  const auto& s = random_suite();
  return s.exactly_once.verdict(std::to_string(s.scenarios) + " random scenarios, " +
                                std::to_string(s.publications) + " publications exactly once, no skips (" +
                                std::to_string(s.resamples) + " disconnected samples redrawn, " +
                                format_fixed(s.seconds, 1) + " s)");
}

Verdict criterion5() {
  const std::vector<Position> own{Position{5}, Position{12}, Position{18}};
  std::vector<RoutingEntry> row{{Position{14}, 0, {}}, {Position{14}, 0, {}}, {Position{20}, 0, {}}};
  const std::vector<Position> sp{Position{3}, Position{7}};
  fold_subscriber_positions(own, row, sp, 22, 1, 100);
  Check check;
  check.require(row[0].next_subscriber == Position{7} && row[1].next_subscriber == Position{14} &&
                    row[2].next_subscriber == Position{20},
                "row is <" + std::to_string(row[0].next_subscriber.value()) + "," +
                    std::to_string(row[1].next_subscriber.value()) + "," +
                    std::to_string(row[2].next_subscriber.value()) + ">");
  return check.verdict("<14,14,20> with candidates <3,7> becomes <7,14,20>");
}

Verdict criterion6() {
  const auto start = Clock::now();
  SweepGrid grid{{25, 50, 100}, {0.1, 0.2, 0.3, 0.4, 0.5}, {10, 20}, 30, 6, 0};
  const SweepResult result = sweep(grid);

  std::vector<double> all;
  std::map<double, std::vector<double>> by_density;
  std::size_t skipped = 0;
  for (const auto& r : result.instances) {
    if (!r.ok || r.tx(Baseline::kTd) == 0) {
      ++skipped;
      continue;
    }
    const double g = gain(r.psvr_tx, r.tx(Baseline::kTd));
    all.push_back(g);
    by_density[r.edge_prob].push_back(g);
  }
  const Summary overall = summarize(all);
  Check check;
  check.require(overall.mean <= 15.0, "mean overhead " + format_fixed(overall.mean) + "% exceeds 15%");
  std::ostringstream medians;
  std::optional<double> previous;
  for (const auto& [p, gains] : by_density) {
    const double median = summarize(gains).median;
    medians << (previous ? ", " : "") << "p=" << format_fixed(p, 1) << ": " << format_fixed(median);
    if (previous) {
      check.require(median <= *previous, "median at p=" + format_fixed(p, 1) + " rose to " + format_fixed(median));
    }
    previous = median;
  }
  return check.verdict("mean overhead vs T_D " + format_fixed(overall.mean) + "% over " +
                       std::to_string(all.size()) + " instances (" + std::to_string(skipped) +
                       " skipped); medians " + medians.str() + " (" + format_fixed(seconds_since(start), 1) +
                       " s)");
}

Verdict criterion7() {
  std::mt19937_64 rng(77);
  Check check;
  std::size_t runs = 0;
  std::size_t resamples = 0;
  while (runs < 50) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(5, 60)(rng);
    const double p = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
    const auto r = run_instance(n, p, n, rng());
    if (!r.ok) {
      ++resamples;
      continue;
    }
    ++runs;
    check.require(r.psvr_tx == r.tx(Baseline::kShen),
                  "n=" + std::to_string(n) + ": ring " + std::to_string(r.psvr_tx) + " vs tree " +
                      std::to_string(r.tx(Baseline::kShen)));
    check.require(r.psvr_exactly_once && r.shen_exactly_once, "n=" + std::to_string(n) + " missed a delivery");
  }
  return check.verdict(std::to_string(runs) + " instances with every node subscribed, equal transmission counts (" +
                       std::to_string(resamples) + " disconnected samples redrawn)");
}

struct RecoveryRun {
  Scenario scenario;
  Tick fault_at = 0;
};

// Random topology with a handful of subscribers and a steady publication stream.
RecoveryRun recovery_base(std::mt19937_64& rng, std::size_t& resamples) {
  std::size_t n = std::uniform_int_distribution<std::size_t>(10, 40)(rng);
  double p = std::uniform_real_distribution<double>(0.1, 0.4)(rng);
  const Graph g = sample_graph(n, p, rng, resamples);
  RecoveryRun run;
  Scenario& sc = run.scenario;
  sc.topology = ExplicitTopology{n, {g.edges().begin(), g.edges().end()}};
  sc.seed = rng();
  std::vector<NodeId> order;
  for (std::uint32_t v = 0; v < n; ++v) order.emplace_back(v);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t subs = std::uniform_int_distribution<std::size_t>(3, std::max<std::size_t>(3, n / 2))(rng);
  for (std::size_t i = 0; i < subs; ++i) sc.subscriptions.push_back({0, order[i], true, 0});
  const Tick lease = LeaseTimings::defaults_for(2 * (n - 1), 1).lease_period;
  run.fault_at = 2 * lease + 1;
  sc.duration = run.fault_at + 4 * lease;
  sc.schedule = PublicationSchedule{lease / 2, std::max<Tick>(lease / 10, 1), sc.duration, {}, 0, 8};
  return run;
}

Verdict criterion8() {
  std::mt19937_64 rng(88);
  Check check;
  std::size_t resamples = 0;
  std::size_t checked_pubs = 0;
  std::size_t writebacks = 0;
  for (int k = 0; k < 100; ++k) {
    RecoveryRun run = recovery_base(rng, resamples);
    Scenario& sc = run.scenario;
    const bool corrupt = k < 50;
    std::string what;
    if (corrupt) {
      // Point one entry at the non-subscriber right after its own position,
      // closer than the true next subscriber. No announcement can displace
      // it; only the write-back path can.
      Simulator probe(sc);
      probe.run_until(run.fault_at - 1);
      std::vector<std::pair<NodeId, std::size_t>> targets;
      const VirtualRing& ring = *probe.instance().ring;
      for (std::uint32_t v = 0; v < sc.node_count(); ++v) {
        const auto& node = probe.psvr(NodeId{v});
        for (std::size_t j = 0; j < node.positions().size(); ++j) {
          const Position own = node.positions()[j];
          const Position ns = node.table().at(0, j).next_subscriber;
          if (ccw_dist(own, ns, ring.length()) >= 2) targets.emplace_back(NodeId{v}, j);
        }
      }
      if (targets.empty()) {
        --k;
        continue;
      }
      const auto [v, j] = targets[rng() % targets.size()];
      const Position own = probe.psvr(v).positions()[j];
      sc.faults.push_back({run.fault_at, CorruptFault{v, 0, j, ring.successor(own)}});
      what = "corruption of node " + std::to_string(v.value());
    } else {
      // Unsubscribe one subscriber while at least two remain.
      const NodeId leaving = sc.subscriptions.front().node;
      sc.subscriptions.push_back({run.fault_at, leaving, false, 0});
      what = "unsubscription of node " + std::to_string(leaving.value());
    }

    Simulator sim(sc);
    const Tick bound = run.fault_at + sim.timings().lease_period + sim.timings().write_back +
                       static_cast<Tick>(sc.node_count()) * sc.hop_delay;
    sim.run();
    const auto& ledger = sim.ledger();
    const std::string tag = "run " + std::to_string(k) + " (" + what + ")";
    std::size_t wb = 0;
    for (const auto& e : ledger.events()) {
      if (e.kind == EventKind::kWriteBack && e.time > run.fault_at && e.time <= bound) wb += 1;
    }
    writebacks += wb;
    check.require(wb >= 1, tag + ": no write-back before the bound");
    for (const auto& rec : ledger.publications()) {
      if (rec.time < bound) continue;
      ++checked_pubs;
      check.require(rec.exactly_once(), tag + ": pub " + std::to_string(rec.id) + " at t=" +
                                            std::to_string(rec.time) + " not exactly once");
    }
  }
  return check.verdict("100 fault runs (50 corruptions, 50 unsubscriptions), " + std::to_string(checked_pubs) +
                       " publications after the recovery bound exactly once, " + std::to_string(writebacks) +
                       " write-back events");
}

Verdict criterion9() {
  Check check;
  std::size_t lossy_windows = 0;
  std::size_t clean_windows = 0;
  double lowest = 100.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 30;
    Scenario sc;
    sc.topology = GeneratedTopology{n, 0.3};
    sc.seed = seed;
    std::mt19937_64 rng(seed);
    std::vector<NodeId> order;
    for (std::uint32_t v = 0; v < n; ++v) order.emplace_back(v);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < 8; ++i) sc.subscriptions.push_back({0, order[i], true, 0});
    const Tick lease = LeaseTimings::defaults_for(2 * (n - 1), 1).lease_period;
    const Tick off = 8 * lease;
    sc.loss = 0.05;
    sc.loss_schedule.push_back({off, 0.0});
    sc.duration = off + 4 * lease;
    sc.schedule = PublicationSchedule{lease / 2, std::max<Tick>(lease / 40, 1), sc.duration, {}, 0, 8};
    Simulator sim(sc);
    sim.run();
    const std::string tag = "seed " + std::to_string(seed);
    for (const auto& w : delivery_ratio(sim.ledger(), lease)) {
      if (!w.percent) continue;
      if (w.start >= lease && w.end <= off) {
        ++lossy_windows;
        lowest = std::min(lowest, *w.percent);
        check.require(*w.percent >= 70.0 && *w.percent < 100.0,
                      tag + " window at " + std::to_string(w.start) + ": " + format_fixed(*w.percent) + "%");
      } else if (w.start >= off + 2 * lease && w.end <= sc.duration) {
        ++clean_windows;
        check.require(*w.percent == 100.0,
                      tag + " window at " + std::to_string(w.start) + " after recovery: " + format_fixed(*w.percent) +
                          "%");
      }
    }
  }
  return check.verdict("20 seeds, " + std::to_string(lossy_windows) + " lossy windows in [70%, 100%) (lowest " +
                       format_fixed(lowest) + "%), " + std::to_string(clean_windows) +
                       " windows at 100% two lease periods after loss stops");
}

Verdict criterion10() {
  const auto& s = random_suite();
  return s.ring_bound.verdict(std::to_string(s.publications) + " publications within l transmissions, " +
                              std::to_string(s.strict_cases) + " with a non-subscriber strictly below l");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "Criterion number(s) to run (default: all)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (int i = 1; i <= 10; ++i) selected.push_back(i);
  }

  const std::map<int, std::function<Verdict()>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10},
  };

  int failed = 0;
  for (int id : selected) {
    Verdict v;
    try {
      v = criteria.at(id)();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << v.detail << std::endl;
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
