#pragma once

#include <vector>

#include "psvr/scenario.hpp"
#include "psvr/topology.hpp"

namespace psvr::fixtures {

// Six-node example: r, a, b, c, d, e.
inline constexpr NodeId kR{0};
inline constexpr NodeId kA{1};
inline constexpr NodeId kB{2};
inline constexpr NodeId kC{3};
inline constexpr NodeId kD{4};
inline constexpr NodeId kE{5};

inline std::vector<Edge> six_node_edges() {
  return {{kR, kE}, {kE, kC}, {kC, kA}, {kE, kD}, {kD, kB}, {kC, kD}};
}

inline std::vector<std::optional<NodeId>> six_node_parents() {
  return {std::nullopt, kC, kD, kE, kE, kR};
}

inline Graph six_node_graph() { return Graph(6, six_node_edges()); }

inline SpanningTree six_node_tree() { return SpanningTree(kR, six_node_parents()); }

/// Six-node topology with subscribers a, b, c on channel 0.
inline Scenario six_node_scenario() {
  Scenario sc;
  sc.topology = ExplicitTopology{6, six_node_edges()};
  sc.tree = six_node_parents();
  for (NodeId v : {kA, kB, kC}) sc.subscriptions.push_back({0, v, true, 0});
  sc.duration = 100;
  return sc;
}

// Eleven-node example. Ids follow depth-first order, so node ids equal the
// position of their first visit: N1=0, a=1, N3=2, N4=3, N5=4, N6=5, N7=6,
// N8=7, b=8, N10=9, N11=10.
inline constexpr NodeId kN1{0};
inline constexpr NodeId kPubA{1};
inline constexpr NodeId kN3{2};
inline constexpr NodeId kN4{3};
inline constexpr NodeId kN5{4};
inline constexpr NodeId kN6{5};
inline constexpr NodeId kN7{6};
inline constexpr NodeId kN8{7};
inline constexpr NodeId kPubB{8};
inline constexpr NodeId kN10{9};
inline constexpr NodeId kN11{10};

inline std::vector<std::optional<NodeId>> eleven_node_parents() {
  return {std::nullopt, kN1, kPubA, kPubA, kN4, kN1, kN6, kN1, kN1, kPubB, kN10};
}

inline std::vector<Edge> eleven_node_edges() {
  std::vector<Edge> edges;
  const auto parents = eleven_node_parents();
  for (std::uint32_t v = 0; v < parents.size(); ++v) {
    if (parents[v]) edges.emplace_back(NodeId{v}, *parents[v]);
  }
  edges.emplace_back(kPubA, kN8);
  edges.emplace_back(kPubB, kN3);
  return edges;
}

/// Eleven-node topology with subscribers N3, N5, N10 on channel 0.
inline Scenario eleven_node_scenario() {
  Scenario sc;
  sc.topology = ExplicitTopology{11, eleven_node_edges()};
  sc.tree = eleven_node_parents();
  for (NodeId v : {kN3, kN5, kN10}) sc.subscriptions.push_back({0, v, true, 0});
  sc.duration = 100;
  return sc;
}

}  // namespace psvr::fixtures
