#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "psvr/ring.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace psvr {
namespace {

std::vector<std::uint32_t> raw(std::span<const NodeId> seq) {
  std::vector<std::uint32_t> out;
  for (NodeId v : seq) out.push_back(v.value());
  return out;
}

TEST(VirtualRing, SixNodeWalk) {
  const auto ring = VirtualRing::build(fixtures::six_node_tree(), fixtures::six_node_graph());
  EXPECT_EQ(ring.length(), 10u);
  EXPECT_EQ(raw(ring.sequence()), (std::vector<std::uint32_t>{0, 5, 3, 1, 3, 5, 4, 2, 4, 5}));
  // The only kept non-tree edge is c-d; c sits at 2 and 4, d at 6 and 8.
  for (Position pc : {Position{2}, Position{4}}) {
    for (Position pd : {Position{6}, Position{8}}) {
      EXPECT_TRUE(ring.has_shortcut(pc, pd));
      EXPECT_TRUE(ring.has_shortcut(pd, pc));
    }
  }
  EXPECT_EQ(ring.shortcut_count(), 8u);
}

TEST(VirtualRing, NearestAheadShortcuts) {
  const auto ring =
      VirtualRing::build(fixtures::six_node_tree(), fixtures::six_node_graph(), ShortcutMode::kNearestAhead);
  EXPECT_TRUE(ring.has_shortcut(Position{2}, Position{6}));
  EXPECT_FALSE(ring.has_shortcut(Position{2}, Position{8}));
  EXPECT_TRUE(ring.has_shortcut(Position{8}, Position{2}));
  EXPECT_TRUE(ring.has_shortcut(Position{6}, Position{2}));
}

TEST(VirtualRing, ElevenNodeWalkFollowsIds) {
  Graph g(11, fixtures::eleven_node_edges());
  const auto ring = VirtualRing::build(SpanningTree(fixtures::kN1, fixtures::eleven_node_parents()), g);
  EXPECT_EQ(ring.length(), 20u);
  EXPECT_EQ(raw(ring.sequence()),
            (std::vector<std::uint32_t>{0, 1, 2, 1, 3, 4, 3, 1, 0, 5, 6, 5, 0, 7, 0, 8, 9, 10, 9, 8}));
  EXPECT_TRUE(ring.has_shortcut(Position{7}, Position{13}));
  EXPECT_TRUE(ring.has_shortcut(Position{19}, Position{2}));
}

class RandomRing : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomRing, StructuralProperties) {
  const Graph g = generate_er(35, 0.12, GetParam());
  const SpanningTree tree = build_tree(g, central_node(g));
  const auto ring = VirtualRing::build(tree, g);
  const std::size_t l = ring.length();
  const std::size_t n = g.node_count();
  ASSERT_EQ(l, 2 * (n - 1));

  // Consecutive positions are tree neighbours; each node appears deg_T times.
  for (std::uint32_t i = 0; i < l; ++i) {
    EXPECT_TRUE(tree.is_tree_edge(ring.at(Position{i}), ring.at(ring.successor(Position{i}))));
  }
  for (std::uint32_t v = 0; v < n; ++v) {
    EXPECT_EQ(ring.positions_of(NodeId{v}).size(), std::max<std::size_t>(tree.degree(NodeId{v}), 1));
    for (Position p : ring.positions_of(NodeId{v})) EXPECT_EQ(ring.at(p), NodeId{v});
  }

  // Non-interlacing: for any two nodes, their position sets never alternate
  // a..b..a..b around the ring.
  std::map<NodeId, std::size_t> first;
  for (std::uint32_t i = 0; i < l; ++i) first.try_emplace(ring.at(Position{i}), i);
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      std::vector<int> pattern;
      for (NodeId v : ring.sequence()) {
        int tag = v == NodeId{a} ? 0 : v == NodeId{b} ? 1 : -1;
        if (tag >= 0 && (pattern.empty() || pattern.back() != tag)) pattern.push_back(tag);
      }
      if (pattern.size() > 1 && pattern.front() == pattern.back()) pattern.pop_back();
      EXPECT_LE(pattern.size(), 2u) << "nodes " << a << " and " << b << " interlace";
    }
  }

  // Every shortcut lies on a kept non-tree edge.
  for (std::uint32_t i = 0; i < l; ++i) {
    for (Position q : ring.shortcuts_from(Position{i})) {
      const NodeId u = ring.at(Position{i});
      const NodeId v = ring.at(q);
      EXPECT_TRUE(g.has_edge(u, v));
      EXPECT_FALSE(tree.is_tree_edge(u, v));
    }
  }
}

TEST_P(RandomRing, ClosestNeverPassesGoal) {
  const Graph g = generate_er(30, 0.2, GetParam());
  const auto ring = VirtualRing::build(build_tree(g, central_node(g)), g);
  const std::size_t l = ring.length();
  for (std::uint32_t p = 0; p < l; ++p) {
    for (std::uint32_t goal = 0; goal < l; ++goal) {
      const Position next = get_pos_closest_to(ring, Position{p}, Position{goal});
      const bool one_hop = next == ring.successor(Position{p}) || ring.has_shortcut(Position{p}, next);
      ASSERT_TRUE(one_hop);
      if (goal != p) {
        EXPECT_TRUE(oracle::walk_between(next.value(), p, goal, l) || next == ring.successor(Position{p}));
        if (next != ring.successor(Position{p})) {
          EXPECT_LE(ccw_dist(Position{p}, next, l), ccw_dist(Position{p}, Position{goal}, l));
        }
      }
      // Farthest admissible candidate.
      for (Position q : ring.shortcuts_from(Position{p})) {
        if (goal != p && oracle::walk_between(q.value(), p, goal, l)) {
          EXPECT_GE(ccw_dist(Position{p}, next, l), ccw_dist(Position{p}, q, l));
        }
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomRing, ::testing::Values(1, 2, 3, 4, 5, 6, 7, 8));

TEST(IsBetween, MatchesStepwiseWalk) {
  for (std::size_t l : {1u, 2u, 7u, 12u}) {
    for (std::uint32_t t = 0; t < l; ++t) {
      for (std::uint32_t a = 0; a < l; ++a) {
        for (std::uint32_t b = 0; b < l; ++b) {
          EXPECT_EQ(is_between(Position{t}, Position{a}, Position{b}, l), oracle::walk_between(t, a, b, l))
              << t << " in (" << a << ", " << b << "] mod " << l;
        }
      }
    }
  }
}

TEST(CcwDist, Wraps) {
  EXPECT_EQ(ccw_dist(Position{8}, Position{2}, 10), 4u);
  EXPECT_EQ(ccw_dist(Position{2}, Position{8}, 10), 6u);
  EXPECT_EQ(ccw_dist(Position{3}, Position{3}, 10), 0u);
}

TEST(VirtualRing, DumpListsSequenceAndShortcuts) {
  const auto ring = VirtualRing::build(fixtures::six_node_tree(), fixtures::six_node_graph());
  std::ostringstream out;
  ring.dump(out);
  const std::string text = out.str();
  EXPECT_NE(text.find("0 5 3 1 3 5 4 2 4 5"), std::string::npos);
  EXPECT_NE(text.find("sc 2:"), std::string::npos);
}

}  // namespace
}  // namespace psvr
