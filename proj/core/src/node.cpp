#include "psvr/node.hpp"

#include <algorithm>
#include <string>

#include "psvr/errors.hpp"

namespace psvr {

LeaseTimings LeaseTimings::defaults_for(std::size_t ring_length, Tick hop_delay) {
  LeaseTimings t;
  t.lease_period = std::max<Tick>(4 * static_cast<Tick>(ring_length) * hop_delay, 4);
  t.clean_period = std::max<Tick>(t.lease_period / 4, 1);
  t.write_back = 2 * t.lease_period;
  return t;
}

RoutingTable::RoutingTable(std::size_t channel_count, std::span<const Position> own, Tick now)
    : channels_(channel_count), columns_(own.size()) {
  cells_.reserve(channels_ * columns_);
  for (std::size_t c = 0; c < channels_; ++c) {
    for (Position p : own) cells_.push_back(RoutingEntry{p, now, std::nullopt});
  }
}

PsvrNode::PsvrNode(NodeId id, std::shared_ptr<const VirtualRing> ring, TreeLinks links, std::size_t channel_count,
                   LeaseTimings timings, Tick now, ForwardingRule rule, std::optional<NodeId> ring_slot)
    : id_(id), channel_count_(channel_count), timings_(timings), rule_(rule) {
  rebind(std::move(ring), std::move(links), now, ring_slot);
  clean_timer_.arm(now + timings_.clean_period);
}

void PsvrNode::rebind(std::shared_ptr<const VirtualRing> ring, TreeLinks links, Tick now,
                      std::optional<NodeId> ring_slot) {
  ring_ = std::move(ring);
  links_ = std::move(links);
  auto own = ring_->positions_of(ring_slot.value_or(id_));
  positions_.assign(own.begin(), own.end());
  table_ = RoutingTable(channel_count_, positions_, now);
  if (!subscriptions_.empty()) sub_timer_.arm(now);
}

bool PsvrNode::owns(Position p) const { return std::binary_search(positions_.begin(), positions_.end(), p); }

std::size_t PsvrNode::index_of(Position p) const {
  auto it = std::lower_bound(positions_.begin(), positions_.end(), p);
  if (it == positions_.end() || *it != p) {
    throw ProtocolError("position " + std::to_string(p.value()) + " is not owned by node " +
                        std::to_string(id_.value()));
  }
  return static_cast<std::size_t>(it - positions_.begin());
}

void PsvrNode::subscribe(ChannelId c, Tick now) {
  if (c >= channel_count_) throw ProtocolError("unknown channel " + std::to_string(c));
  if (subscriptions_.insert(c).second) sub_timer_.arm(now);
}

void PsvrNode::unsubscribe(ChannelId c) { subscriptions_.erase(c); }

std::optional<SubMsg> PsvrNode::on_timer_sub(Tick now) {
  if (subscriptions_.empty()) {
    sub_timer_.disarm();
    return std::nullopt;
  }
  sub_timer_.arm(now + timings_.lease_period);
  return SubMsg{std::nullopt, {subscriptions_.begin(), subscriptions_.end()}, positions_};
}

std::optional<SubMsg> PsvrNode::on_sub(const SubMsg& msg, NodeId from, Tick now) {
  if (msg.prev_sender == id_) return std::nullopt;

  const std::size_t l = ring_->length();
  const bool malformed = msg.channels.empty() || msg.positions.empty() ||
                         std::any_of(msg.positions.begin(), msg.positions.end(),
                                     [l](Position p) { return p.value() >= l; });
  if (malformed) {
    ++malformed_subs_;
    return std::nullopt;
  }

  std::vector<ChannelId> remaining;
  for (ChannelId c : msg.channels) {
    if (c >= channel_count_) continue;
    upd_sn(c, msg.positions, now);
    if (!subscriptions_.contains(c)) remaining.push_back(c);
  }
  if (remaining.empty() || links_.num_children() == 0) return std::nullopt;
  return SubMsg{from, std::move(remaining), msg.positions};
}

void fold_subscriber_positions(std::span<const Position> own, std::span<RoutingEntry> row,
                               std::span<const Position> sp, std::size_t ring_length, Tick now, Tick lease_period) {
  for (Position candidate : sp) {
    // Own positions never become a next subscriber.
    if (std::binary_search(own.begin(), own.end(), candidate)) continue;
    for (std::size_t j = 0; j < own.size(); ++j) {
      auto& entry = row[j];
      if (is_between(candidate, own[j], entry.next_subscriber, ring_length)) {
        entry.next_subscriber = candidate;
        entry.renewed_at = now;
        entry.pending.reset();
      } else if (now - entry.renewed_at > lease_period) {
        if (is_between(candidate, own[j], entry.pending.value_or(own[j]), ring_length)) entry.pending = candidate;
      }
    }
  }
}

void PsvrNode::upd_sn(ChannelId c, std::span<const Position> sp, Tick now) {
  if (c >= channel_count_) return;
  fold_subscriber_positions(positions_, table_.row(c), sp, ring_->length(), now, timings_.lease_period);
}

CleanReport PsvrNode::on_timer_clean(Tick now) {
  clean_timer_.arm(now + timings_.clean_period);
  CleanReport report;
  for (std::size_t c = 0; c < channel_count_; ++c) {
    for (std::size_t j = 0; j < positions_.size(); ++j) {
      auto& entry = table_.at(static_cast<ChannelId>(c), j);
      if (now - entry.renewed_at <= timings_.write_back) continue;
      if (entry.pending) {
        entry.next_subscriber = *entry.pending;
        ++report.written_back;
      } else if (entry.next_subscriber != positions_[j]) {
        entry.next_subscriber = positions_[j];
        ++report.expired;
      }
      entry.renewed_at = now;
      entry.pending.reset();
    }
  }
  return report;
}

Position PsvrNode::calc_new_ep(Position p, Position max_ep) const {
  const std::size_t i = index_of(p);
  const Position next_own = positions_[(i + 1) % positions_.size()];
  return is_between(next_own, p, max_ep, ring_->length()) ? next_own : max_ep;
}

std::vector<Forward> PsvrNode::handle_pub(Position cur, Position ep, ChannelId c, const Payload& data,
                                          const PubMeta& meta) const {
  const std::size_t l = ring_->length();
  std::vector<Forward> out;
  for (std::size_t j = 0; j < positions_.size(); ++j) {
    const Position p = positions_[j];
    const Position next_s = table_.at(c, j).next_subscriber;
    const Position new_ep = calc_new_ep(p, ep);

    bool forward = false;
    if (rule_ == ForwardingRule::kSegmentConfined) {
      const bool in_segment = p == cur || (p != ep && is_between(p, cur, ep, l));
      forward = in_segment && next_s != new_ep && is_between(next_s, p, new_ep, l);
    } else {
      forward = next_s != p && is_between(next_s, cur, new_ep, l);
    }
    if (!forward) continue;

    PubMeta next_meta = meta;
    ++next_meta.hops;
    out.push_back(Forward{p, PubMsg{get_pos_closest_to(*ring_, p, next_s), new_ep, c, data, next_meta}});
  }
  return out;
}

std::vector<Forward> PsvrNode::publish(ChannelId c, Payload data, PubMeta meta) const {
  if (c >= channel_count_) throw ProtocolError("unknown channel " + std::to_string(c));
  meta.hops = 0;
  return handle_pub(positions_.front(), positions_.front(), c, data, meta);
}

PubResult PsvrNode::on_pub(const PubMsg& msg) const {
  PubResult result;
  if (!owns(msg.goal) || msg.channel >= channel_count_) {
    result.dropped = true;
    return result;
  }
  result.delivered = subscribed(msg.channel);
  result.forwards = handle_pub(msg.goal, msg.endpoint, msg.channel, msg.data, msg.meta);
  return result;
}

void PsvrNode::overwrite_entry(ChannelId c, std::size_t j, Position next_subscriber, Tick now) {
  auto& entry = table_.at(c, j);
  entry.next_subscriber = next_subscriber;
  entry.renewed_at = now;
  entry.pending.reset();
}

}  // namespace psvr
