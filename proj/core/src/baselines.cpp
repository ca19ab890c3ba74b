#include "psvr/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace psvr {

namespace {

std::vector<NodeId> distinct_targets(NodeId publisher, std::span<const NodeId> subscribers) {
  std::vector<NodeId> out(subscribers.begin(), subscribers.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase(out, publisher);
  return out;
}

// Walks every target up a parent array to the root, collecting the edges.
RouteResult route_over_parents(const std::vector<std::optional<NodeId>>& parent,
                               const std::vector<std::size_t>& depth, NodeId root,
                               const std::vector<NodeId>& targets) {
  RouteResult out;
  std::set<Edge> used;
  for (NodeId t : targets) {
    NodeId v = t;
    while (v != root) {
      NodeId up = *parent[v.value()];
      if (!used.insert(Edge{v, up}).second) break;
      v = up;
    }
    out.deliveries.push_back({t, depth[t.value()]});
  }
  out.edges.assign(used.begin(), used.end());
  out.transmissions = out.edges.size();
  return out;
}

}  // namespace

double RouteResult::mean_hops() const {
  if (deliveries.empty()) return 0.0;
  double total = 0;
  for (const auto& d : deliveries) total += static_cast<double>(d.hops);
  return total / static_cast<double>(deliveries.size());
}

RouteResult route_naive_ring(const VirtualRing& ring, NodeId publisher, std::span<const NodeId> subscribers) {
  const auto targets = distinct_targets(publisher, subscribers);
  const std::size_t l = ring.length();
  const Position start = ring.positions_of(publisher).front();

  RouteResult out;
  out.transmissions = l;
  std::set<Edge> used;
  std::vector<std::optional<std::size_t>> first_visit(ring.node_count());
  Position p = start;
  for (std::size_t step = 1; step <= l; ++step) {
    Position q = ring.successor(p);
    used.insert(Edge{ring.at(p), ring.at(q)});
    auto& seen = first_visit[ring.at(q).value()];
    if (!seen) seen = step;
    p = q;
  }
  out.edges.assign(used.begin(), used.end());
  for (NodeId t : targets) out.deliveries.push_back({t, *first_visit[t.value()]});
  return out;
}

RouteResult route_td(const Graph& g, NodeId publisher, std::span<const NodeId> subscribers) {
  const auto depth = bfs_distances(g, publisher);
  std::vector<std::optional<NodeId>> parent(g.node_count());
  for (std::uint32_t v = 0; v < g.node_count(); ++v) {
    if (NodeId{v} == publisher) continue;
    for (NodeId w : g.neighbors(NodeId{v})) {
      if (depth[w.value()] + 1 == depth[v]) {
        parent[v] = w;
        break;
      }
    }
  }
  return route_over_parents(parent, depth, publisher, distinct_targets(publisher, subscribers));
}

RouteResult route_ts(const SpanningTree& tree, NodeId publisher, std::span<const NodeId> subscribers) {
  // Re-root the tree at the publisher so that paths become parent chains.
  const std::size_t n = tree.node_count();
  std::vector<std::optional<NodeId>> parent(n);
  std::vector<std::size_t> depth(n, 0);
  std::vector<bool> seen(n, false);
  std::vector<NodeId> frontier{publisher};
  seen[publisher.value()] = true;
  while (!frontier.empty()) {
    NodeId v = frontier.back();
    frontier.pop_back();
    for (NodeId w : tree.neighbors(v)) {
      if (seen[w.value()]) continue;
      seen[w.value()] = true;
      parent[w.value()] = v;
      depth[w.value()] = depth[v.value()] + 1;
      frontier.push_back(w);
    }
  }
  return route_over_parents(parent, depth, publisher, distinct_targets(publisher, subscribers));
}

}  // namespace psvr
