#include "psvr/shen.hpp"

#include <algorithm>
#include <string>

#include "psvr/errors.hpp"

namespace psvr {

ShenNode::ShenNode(NodeId id, TreeLinks links, std::size_t channel_count, LeaseTimings timings, Tick now)
    : id_(id), channel_count_(channel_count), timings_(timings) {
  rebind(std::move(links), now);
  clean_timer_.arm(now + timings_.clean_period);
}

void ShenNode::rebind(TreeLinks links, Tick now) {
  links_ = std::move(links);
  neighbours_.clear();
  if (links_.parent) neighbours_.push_back(*links_.parent);
  neighbours_.insert(neighbours_.end(), links_.children.begin(), links_.children.end());
  renewed_.assign(channel_count_, std::vector<std::optional<Tick>>(neighbours_.size()));
  if (!subscriptions_.empty()) sub_timer_.arm(now);
}

void ShenNode::subscribe(ChannelId c, Tick now) {
  if (c >= channel_count_) throw ProtocolError("unknown channel " + std::to_string(c));
  if (subscriptions_.insert(c).second) sub_timer_.arm(now);
}

void ShenNode::unsubscribe(ChannelId c) { subscriptions_.erase(c); }

std::optional<SubMsg> ShenNode::on_timer_sub(Tick now) {
  if (subscriptions_.empty()) {
    sub_timer_.disarm();
    return std::nullopt;
  }
  sub_timer_.arm(now + timings_.lease_period);
  return SubMsg{std::nullopt, {subscriptions_.begin(), subscriptions_.end()}, {}};
}

std::optional<SubMsg> ShenNode::on_sub(const SubMsg& msg, NodeId from, Tick now) {
  if (msg.prev_sender == id_) return std::nullopt;
  if (msg.channels.empty()) {
    ++malformed_subs_;
    return std::nullopt;
  }
  auto it = std::find(neighbours_.begin(), neighbours_.end(), from);
  if (it == neighbours_.end()) return std::nullopt;
  const auto k = static_cast<std::size_t>(it - neighbours_.begin());

  std::vector<ChannelId> remaining;
  for (ChannelId c : msg.channels) {
    if (c >= channel_count_) continue;
    renewed_[c][k] = now;
    if (!subscriptions_.contains(c)) remaining.push_back(c);
  }
  if (remaining.empty() || links_.num_children() == 0) return std::nullopt;
  return SubMsg{from, std::move(remaining), msg.positions};
}

CleanReport ShenNode::on_timer_clean(Tick now) {
  clean_timer_.arm(now + timings_.clean_period);
  CleanReport report;
  for (auto& row : renewed_) {
    for (auto& slot : row) {
      if (slot && now - *slot > timings_.write_back) {
        slot.reset();
        ++report.expired;
      }
    }
  }
  return report;
}

std::vector<NodeId> ShenNode::directions(ChannelId c) const {
  std::vector<NodeId> out;
  for (std::size_t k = 0; k < neighbours_.size(); ++k) {
    if (renewed_.at(c)[k]) out.push_back(neighbours_[k]);
  }
  return out;
}

std::vector<TreeForward> ShenNode::fan_out(ChannelId c, const Payload& data, const PubMeta& meta,
                                           std::optional<NodeId> except) const {
  std::vector<TreeForward> out;
  PubMeta next = meta;
  ++next.hops;
  for (std::size_t k = 0; k < neighbours_.size(); ++k) {
    if (!renewed_[c][k] || neighbours_[k] == except) continue;
    out.push_back(TreeForward{neighbours_[k], PubMsg{Position{0}, Position{0}, c, data, next}});
  }
  return out;
}

std::vector<TreeForward> ShenNode::publish(ChannelId c, Payload data, PubMeta meta) const {
  if (c >= channel_count_) throw ProtocolError("unknown channel " + std::to_string(c));
  meta.hops = 0;
  return fan_out(c, data, meta, std::nullopt);
}

TreePubResult ShenNode::on_pub(const PubMsg& msg, NodeId from) const {
  TreePubResult result;
  if (msg.channel >= channel_count_) return result;
  result.delivered = subscribed(msg.channel);
  result.forwards = fan_out(msg.channel, msg.data, msg.meta, from);
  return result;
}

}  // namespace psvr
