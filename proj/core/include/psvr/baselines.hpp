#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "psvr/ids.hpp"
#include "psvr/ring.hpp"
#include "psvr/topology.hpp"

namespace psvr {

struct RouteDelivery {
  NodeId node;
  std::size_t hops = 0;

  friend bool operator==(const RouteDelivery&, const RouteDelivery&) = default;
};

/// Outcome of one analytically routed publication.
struct RouteResult {
  std::size_t transmissions = 0;
  /// Links used; for tree strategies these form a subtree.
  std::vector<Edge> edges;
  /// One entry per subscriber other than the publisher, ascending by node.
  std::vector<RouteDelivery> deliveries;

  double mean_hops() const;
};

/// The publication walks the whole ring once from the publisher's first
/// position: always l transmissions.
RouteResult route_naive_ring(const VirtualRing& ring, NodeId publisher, std::span<const NodeId> subscribers);

/// BFS tree rooted at the publisher (parent = smallest-id neighbour one level
/// up), with non-subscriber leaves pruned until none remain.
RouteResult route_td(const Graph& g, NodeId publisher, std::span<const NodeId> subscribers);

/// Minimal subtree of a fixed tree spanning the publisher and the subscribers.
RouteResult route_ts(const SpanningTree& tree, NodeId publisher, std::span<const NodeId> subscribers);

}  // namespace psvr
