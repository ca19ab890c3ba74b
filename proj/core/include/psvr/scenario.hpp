#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "psvr/ids.hpp"
#include "psvr/node.hpp"
#include "psvr/ring.hpp"
#include "psvr/topology.hpp"

namespace psvr {

struct GeneratedTopology {
  std::size_t nodes = 0;
  double edge_prob = 0.0;
};

struct ExplicitTopology {
  std::size_t nodes = 0;
  std::vector<Edge> edges;
};

enum class Protocol { kPsvr, kShen };

struct SubscriptionAction {
  Tick time = 0;
  NodeId node;
  bool subscribe = true;
  ChannelId channel = 0;
};

struct Publication {
  Tick time = 0;
  NodeId node;
  ChannelId channel = 0;
  std::size_t size = 0;
};

/// Publications every `period` ticks in [start, stop). With no publishers
/// listed, each one comes from a node drawn uniformly with the scenario seed.
struct PublicationSchedule {
  Tick start = 0;
  Tick period = 1;
  Tick stop = 0;
  std::vector<NodeId> publishers;
  ChannelId channel = 0;
  std::size_t size = 0;
};

struct LossChange {
  Tick time = 0;
  double loss = 0.0;
};

/// Overwrites routing entry [channel][index] of `node` with `next_subscriber`.
struct CorruptFault {
  NodeId node;
  ChannelId channel = 0;
  std::size_t index = 0;
  Position next_subscriber;
};

struct LeaveFault {
  NodeId node;
};

/// Brings back a node that is absent; its links come from the base topology.
struct JoinFault {
  NodeId node;
};

struct Fault {
  Tick time = 0;
  std::variant<CorruptFault, LeaveFault, JoinFault> what;
};

/// Declarative description of one simulation run.
struct Scenario {
  std::variant<GeneratedTopology, ExplicitTopology> topology;
  /// Explicit spanning tree as a parent list (root has none).
  std::optional<std::vector<std::optional<NodeId>>> tree;
  /// Empty selects the central node.
  std::optional<NodeId> root;
  /// 0 keeps every edge.
  std::size_t degree_cap = 0;
  ShortcutMode shortcuts = ShortcutMode::kAllPairs;
  ForwardingRule forwarding = ForwardingRule::kSegmentConfined;
  Protocol protocol = Protocol::kPsvr;
  std::size_t channels = 1;

  std::vector<SubscriptionAction> subscriptions;
  std::vector<Publication> publications;
  std::optional<PublicationSchedule> schedule;

  double loss = 0.0;
  std::vector<LossChange> loss_schedule;
  Tick hop_delay = 1;
  std::optional<Tick> delta_s;
  std::optional<Tick> t_clean;
  std::optional<Tick> t_writeback;
  Tick duration = 0;
  std::uint64_t seed = 1;

  std::vector<Fault> faults;
  std::vector<NodeId> initially_absent;
  Tick rebuild_latency = 0;
  /// Record every transmission in the event trace.
  bool trace = false;

  std::size_t node_count() const;

  /// Throws ValidationError listing every offending field.
  void validate() const;

  static Scenario from_json(std::string_view text);
  static Scenario load(const std::filesystem::path& path);
  std::string to_json() const;
};

/// Topology artefacts of a scenario before any protocol runs.
struct Instance {
  LinkSelection links;
  SpanningTree tree;
  std::shared_ptr<const VirtualRing> ring;
};

/// Builds graph, link selection, tree and ring for `nodes` (ascending,
/// relabelled to 0..k-1 in that order) of `base`. The root and explicit tree
/// are only honoured when `nodes` covers the whole base graph.
Instance build_instance(const Scenario& sc, const Graph& base, const std::vector<NodeId>& nodes);

/// Base topology of a scenario: generated, or the explicit edge list.
Graph base_graph(const Scenario& sc);

/// Publications of the explicit list and the schedule, sorted by time.
std::vector<Publication> expand_publications(const Scenario& sc);

/// Effective leasing constants for a ring of length `ring_length`.
LeaseTimings effective_timings(const Scenario& sc, std::size_t ring_length);

}  // namespace psvr
