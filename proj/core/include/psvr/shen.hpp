#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "psvr/ids.hpp"
#include "psvr/messages.hpp"
#include "psvr/node.hpp"

namespace psvr {

/// A publication copy sent over one tree link.
struct TreeForward {
  NodeId to;
  PubMsg msg;
};

struct TreePubResult {
  bool delivered = false;
  std::vector<TreeForward> forwards;
};

/// Spanning-tree publish/subscribe in the style of Shen et al.: each node
/// remembers, per channel, which tree directions lead to a subscriber, with
/// the same leasing as the ring protocol. Publications follow those
/// directions and never go back the way they came.
class ShenNode {
 public:
  ShenNode(NodeId id, TreeLinks links, std::size_t channel_count, LeaseTimings timings, Tick now);

  void subscribe(ChannelId c, Tick now);
  void unsubscribe(ChannelId c);
  /// Same contract as PsvrNode::on_timer_sub; the SUB carries no positions.
  std::optional<SubMsg> on_timer_sub(Tick now);
  std::optional<SubMsg> on_sub(const SubMsg& msg, NodeId from, Tick now);
  /// Forgets directions not renewed for longer than the write-back period.
  CleanReport on_timer_clean(Tick now);

  std::vector<TreeForward> publish(ChannelId c, Payload data, PubMeta meta) const;
  TreePubResult on_pub(const PubMsg& msg, NodeId from) const;

  /// Tree rebuilt: adopt new links, forget every direction and re-announce.
  void rebind(TreeLinks links, Tick now);

  NodeId id() const { return id_; }
  bool subscribed(ChannelId c) const { return subscriptions_.contains(c); }
  const std::set<ChannelId>& subscriptions() const { return subscriptions_; }
  const TreeLinks& links() const { return links_; }
  const TimerState& sub_timer() const { return sub_timer_; }
  const TimerState& clean_timer() const { return clean_timer_; }
  /// Neighbours currently recorded as leading to a subscriber of `c`.
  std::vector<NodeId> directions(ChannelId c) const;
  std::size_t malformed_subs() const { return malformed_subs_; }

 private:
  std::vector<TreeForward> fan_out(ChannelId c, const Payload& data, const PubMeta& meta,
                                   std::optional<NodeId> except) const;

  NodeId id_;
  TreeLinks links_;
  std::vector<NodeId> neighbours_;
  std::size_t channel_count_;
  LeaseTimings timings_;
  std::set<ChannelId> subscriptions_;
  /// [channel][neighbour index] -> last renewal.
  std::vector<std::vector<std::optional<Tick>>> renewed_;
  TimerState sub_timer_;
  TimerState clean_timer_;
  std::size_t malformed_subs_ = 0;
};

}  // namespace psvr
