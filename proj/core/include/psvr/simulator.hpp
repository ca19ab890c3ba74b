#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <variant>
#include <vector>

#include "psvr/ledger.hpp"
#include "psvr/node.hpp"
#include "psvr/scenario.hpp"
#include "psvr/shen.hpp"

namespace psvr {

/// Deterministic discrete-event engine for one scenario.
///
/// Events run in (time, insertion order). Every transmission is a unicast
/// that arrives `hop_delay` ticks later unless the Bernoulli loss draw drops
/// it; SUB broadcasts are unicasts to the parent and each child.
class Simulator {
 public:
  /// Validates the scenario and builds the first epoch. Throws
  /// ValidationError, GenerationError or SelectionError.
  explicit Simulator(Scenario scenario);

  /// Runs to the scenario duration, then lets publications still in flight
  /// finish (no timers or new actions fire during that drain).
  void run();
  /// Processes every event scheduled at or before `until`.
  void run_until(Tick until);

  Tick now() const { return now_; }
  const Scenario& scenario() const { return scenario_; }
  const TraceLedger& ledger() const { return ledger_; }
  TraceLedger take_ledger() { return std::move(ledger_); }

  const Graph& base() const { return base_; }
  /// Topology of the current epoch, over relabelled ring slots.
  const Instance& instance() const { return *instance_; }
  std::uint32_t epoch() const { return epoch_; }
  const LeaseTimings& timings() const { return timings_; }

  bool active(NodeId v) const;
  /// Throws ProtocolError when `v` is absent or runs the other protocol.
  const PsvrNode& psvr(NodeId v) const;
  const ShenNode& shen(NodeId v) const;
  /// Ring slot of a present node in the current epoch.
  std::optional<NodeId> slot_of(NodeId v) const;
  NodeId node_at_slot(NodeId slot) const { return slot_to_node_.at(slot.value()); }

 private:
  struct PubArrival {
    NodeId to;
    NodeId from;
    PubMsg msg;
    std::uint32_t epoch;
  };
  struct SubArrival {
    NodeId to;
    NodeId from;
    SubMsg msg;
    std::uint32_t epoch;
  };
  struct TimerFire {
    NodeId node;
    bool clean;
    std::uint64_t incarnation;
    std::uint64_t generation;
  };
  struct AppSubscription {
    SubscriptionAction action;
  };
  struct AppPublication {
    Publication pub;
  };
  struct FaultFire {
    std::size_t index;
  };
  struct RebuildFire {};
  struct LossFire {
    double loss;
  };
  using EventBody = std::variant<PubArrival, SubArrival, TimerFire, AppSubscription, AppPublication, FaultFire,
                               RebuildFire, LossFire>;
  struct Event {
    Tick time;
    std::uint64_t seq;
    EventBody what;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  void schedule(Tick at, EventBody what);
  void dispatch(Event& ev);
  void handle(PubArrival& ev);
  void handle(SubArrival& ev);
  void handle(const TimerFire& ev);
  void handle(const AppSubscription& ev);
  void handle(const AppPublication& ev);
  void handle(const FaultFire& ev);
  void handle(const RebuildFire& ev);
  void handle(const LossFire& ev);

  void rebuild();
  TreeLinks links_of(NodeId v) const;
  void create_node(NodeId v);
  void sync_timers(NodeId v);
  bool draw_loss();
  void broadcast_sub(NodeId from, const SubMsg& msg);
  void send_ring(NodeId from, const Forward& fwd);
  void send_tree(NodeId from, const TreeForward& fwd);
  std::vector<NodeId> ground_truth(ChannelId c, std::optional<NodeId> except) const;
  bool subscribed(NodeId v, ChannelId c) const;
  void diagnose(NodeId v, std::string detail);

  Scenario scenario_;
  Graph base_;
  std::optional<Instance> instance_;
  LeaseTimings timings_;
  std::uint32_t epoch_ = 0;
  Tick now_ = 0;
  double loss_ = 0.0;

  std::vector<bool> present_;
  std::vector<NodeId> pending_joins_;
  std::vector<std::optional<NodeId>> node_to_slot_;
  std::vector<NodeId> slot_to_node_;
  std::vector<std::unique_ptr<PsvrNode>> psvr_;
  std::vector<std::unique_ptr<ShenNode>> shen_;
  std::vector<std::uint64_t> incarnation_;
  std::vector<std::uint64_t> scheduled_sub_;
  std::vector<std::uint64_t> scheduled_clean_;

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  std::mt19937_64 loss_rng_;
  TraceLedger ledger_;
};

/// Convenience: construct, run, and return the ledger.
TraceLedger simulate(const Scenario& scenario);

}  // namespace psvr
