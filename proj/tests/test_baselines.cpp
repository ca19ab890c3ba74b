#include <gtest/gtest.h>

#include <random>

#include "psvr/baselines.hpp"
#include "psvr/shen.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace psvr {
namespace {

using namespace fixtures;

std::vector<NodeId> sample(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<NodeId> all;
  for (std::uint32_t v = 0; v < n; ++v) all.emplace_back(v);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(k);
  return all;
}

TEST(RouteNaiveRing, AlwaysWalksWholeRing) {
  const auto ring = VirtualRing::build(six_node_tree(), six_node_graph());
  const std::vector<NodeId> subs{kA, kB, kC};
  const auto r = route_naive_ring(ring, kD, subs);
  EXPECT_EQ(r.transmissions, ring.length());
  // From d's first position 6: b at step 1, then 9, 0, 1, 2 (c) at step 6, a at step 7.
  ASSERT_EQ(r.deliveries.size(), 3u);
  EXPECT_EQ(r.deliveries[0], (RouteDelivery{kA, 7}));
  EXPECT_EQ(r.deliveries[1], (RouteDelivery{kB, 1}));
  EXPECT_EQ(r.deliveries[2], (RouteDelivery{kC, 6}));
}

TEST(RouteTd, SixNodeExample) {
  const std::vector<NodeId> subs{kA, kB, kC};
  const auto r = route_td(six_node_graph(), kD, subs);
  // d-b, d-c, c-a.
  EXPECT_EQ(r.transmissions, 3u);
  EXPECT_DOUBLE_EQ(r.mean_hops(), (2.0 + 1.0 + 1.0) / 3.0);
}

TEST(RouteTs, SixNodeExample) {
  const std::vector<NodeId> subs{kA, kB, kC};
  const auto r = route_ts(six_node_tree(), kD, subs);
  // d-b, d-e, e-c, c-a.
  EXPECT_EQ(r.transmissions, 4u);
}

TEST(Baselines, PublisherIsNotATarget) {
  const std::vector<NodeId> subs{kD};
  EXPECT_EQ(route_td(six_node_graph(), kD, subs).transmissions, 0u);
  EXPECT_EQ(route_ts(six_node_tree(), kD, subs).transmissions, 0u);
  EXPECT_TRUE(route_td(six_node_graph(), kD, subs).deliveries.empty());
}

class RandomBaselines : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomBaselines, MatchOracles) {
  std::mt19937_64 rng(GetParam());
  const Graph g = generate_er(40, 0.1, GetParam());
  const SpanningTree tree = build_tree(g, central_node(g));
  for (std::size_t s : {1u, 5u, 15u, 40u}) {
    const auto subs = sample(40, s, rng);
    const NodeId pub{static_cast<std::uint32_t>(rng() % 40)};
    std::vector<NodeId> targets;
    for (NodeId v : subs) {
      if (v != pub) targets.push_back(v);
    }

    const auto td = route_td(g, pub, subs);
    const auto expected_edges = oracle::path_union(g, pub, targets);
    EXPECT_EQ(td.transmissions, expected_edges.size());
    EXPECT_TRUE(std::equal(td.edges.begin(), td.edges.end(), expected_edges.begin(), expected_edges.end()));
    const auto dist = oracle::distances(g, pub);
    for (const auto& d : td.deliveries) EXPECT_EQ(d.hops, dist[d.node.value()]);

    auto terminals = targets;
    terminals.push_back(pub);
    const auto ts = route_ts(tree, pub, subs);
    EXPECT_EQ(ts.transmissions, targets.empty() ? 0 : oracle::steiner_subtree_edges(tree, terminals));
    for (const auto& e : ts.edges) EXPECT_TRUE(tree.is_tree_edge(e.u, e.v));

    const auto ring = VirtualRing::build(tree, g);
    EXPECT_EQ(route_naive_ring(ring, pub, subs).transmissions, ring.length());
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomBaselines, ::testing::Values(1, 2, 3, 4, 5));

TEST(ShenNode, RecordsDirectionsAndFansOut) {
  const auto tree = six_node_tree();
  const auto timings = LeaseTimings::defaults_for(10, 1);
  ShenNode c(kC, TreeLinks{kE, {kA}}, 1, timings, 0);

  auto fwd = c.on_sub(SubMsg{std::nullopt, {0}, {}}, kA, 1);
  ASSERT_TRUE(fwd);
  EXPECT_EQ(fwd->prev_sender, kA);
  EXPECT_EQ(c.directions(0), std::vector<NodeId>{kA});

  const auto out = c.publish(0, {7}, PubMeta{kC, 0, 0});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].to, kA);
  EXPECT_EQ(out[0].msg.meta.hops, 1u);

  const auto from_parent = c.on_pub(PubMsg{{}, {}, 0, {}, PubMeta{kD, 0, 2}}, kE);
  EXPECT_FALSE(from_parent.delivered);
  ASSERT_EQ(from_parent.forwards.size(), 1u);
  EXPECT_EQ(from_parent.forwards[0].msg.meta.hops, 3u);
  EXPECT_TRUE(c.on_pub(PubMsg{}, kA).forwards.empty());

  EXPECT_EQ(c.on_timer_clean(timings.write_back).expired, 0u);
  EXPECT_EQ(c.on_timer_clean(timings.write_back + 2).expired, 1u);
  EXPECT_TRUE(c.directions(0).empty());
}

TEST(ShenNode, SubscriberStopsFloodAndEchoesAreDropped) {
  const auto timings = LeaseTimings::defaults_for(10, 1);
  ShenNode e(kE, TreeLinks{kR, {kC, kD}}, 1, timings, 0);
  e.subscribe(0, 0);
  EXPECT_EQ(e.sub_timer().deadline, 0);
  auto own = e.on_timer_sub(0);
  ASSERT_TRUE(own);
  EXPECT_TRUE(own->positions.empty());
  EXPECT_FALSE(e.on_sub(SubMsg{std::nullopt, {0}, {}}, kC, 1));
  EXPECT_EQ(e.directions(0), std::vector<NodeId>{kC});
  EXPECT_FALSE(e.on_sub(SubMsg{kE, {0}, {}}, kD, 1));
  EXPECT_EQ(e.directions(0), std::vector<NodeId>{kC});
  const auto r = e.on_pub(PubMsg{}, kR);
  EXPECT_TRUE(r.delivered);
  ASSERT_EQ(r.forwards.size(), 1u);
  EXPECT_EQ(r.forwards[0].to, kC);
}

}  // namespace
}  // namespace psvr
