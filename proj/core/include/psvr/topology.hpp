#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "psvr/ids.hpp"

namespace psvr {

/// Undirected edge stored with the smaller id first.
struct Edge {
  NodeId u;
  NodeId v;

  Edge() = default;
  Edge(NodeId a, NodeId b) : u(a < b ? a : b), v(a < b ? b : a) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Connected simple undirected graph on nodes 0..n-1.
///
/// Construction validates the edge list: no self-loops, no duplicates,
/// every id in range, and the result must be connected.
class Graph {
 public:
  Graph(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  /// Sorted ascending.
  std::span<const Edge> edges() const { return edges_; }
  /// Sorted ascending.
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_.at(v.value()); }
  std::size_t degree(NodeId v) const { return adjacency_.at(v.value()).size(); }
  bool has_edge(NodeId a, NodeId b) const;
  std::size_t max_degree() const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> adjacency_;
};

/// True when the edge list connects all `node_count` nodes. Ids must be in range.
bool is_connected(std::size_t node_count, std::span<const Edge> edges);

/// Hop distances from `source`; unreachable nodes never occur in a Graph.
std::vector<std::size_t> bfs_distances(const Graph& g, NodeId source);

inline constexpr int kErRetryBudget = 1000;

/// Connected G(n, p) sample. Resamples until connected, up to kErRetryBudget times.
Graph generate_er(std::size_t n, double p, std::uint64_t seed);

/// Bounded-degree connected subset of a graph's edges.
struct LinkSelection {
  Graph base;
  Graph kept;
  std::size_t degree_cap;
};

/// Greedy degree-capped pruning: repeatedly takes the highest-degree node
/// over the cap and drops one of its edges that is not a bridge, preferring
/// high-degree far ends. Ties are ordered by a seeded shuffle.
LinkSelection select_links(const Graph& g, std::size_t degree_cap, std::uint64_t seed);

/// Keeps every edge (no cap).
LinkSelection keep_all_links(const Graph& g);

/// Rooted spanning tree with children in ascending id order.
class SpanningTree {
 public:
  /// `parent[root]` must be empty; every other node names its parent.
  SpanningTree(NodeId root, std::vector<std::optional<NodeId>> parent);

  NodeId root() const { return root_; }
  std::size_t node_count() const { return parent_.size(); }
  std::optional<NodeId> parent(NodeId v) const { return parent_.at(v.value()); }
  std::span<const NodeId> children(NodeId v) const { return children_.at(v.value()); }
  /// Parent (if any) followed by children.
  std::vector<NodeId> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const;
  bool is_tree_edge(NodeId a, NodeId b) const;
  std::size_t depth(NodeId v) const { return depth_.at(v.value()); }
  std::size_t height() const;
  std::vector<Edge> edges() const;

 private:
  NodeId root_;
  std::vector<std::optional<NodeId>> parent_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<std::size_t> depth_;
};

/// BFS spanning tree over the kept edges; each node's parent is the node that
/// discovered it first when neighbours are scanned in ascending order.
SpanningTree build_tree(const Graph& kept, NodeId root);

/// Node of minimum eccentricity, smallest id on ties.
NodeId central_node(const Graph& g);

/// Plain-text graph format: `n m` followed by m lines `u v`.
Graph read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);

}  // namespace psvr
