#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "psvr/ids.hpp"
#include "psvr/messages.hpp"
#include "psvr/ring.hpp"

namespace psvr {

/// Leasing constants shared by every node of a run.
struct LeaseTimings {
  /// Resubscribe period δ_S; entries older than this are stale.
  Tick lease_period = 0;
  /// Period of the cleaning timer.
  Tick clean_period = 0;
  /// Age after which a stale entry is overwritten by its pending value.
  Tick write_back = 0;

  /// δ_S = 4·l·hop_delay, T_clean = δ_S/4, T_w/back = 2·δ_S.
  static LeaseTimings defaults_for(std::size_t ring_length, Tick hop_delay);
};

/// Selects the publication forwarding test.
enum class ForwardingRule {
  /// Only own positions inside the arrival segment forward, bounded by the
  /// handling position on the left and strictly before the new endpoint.
  kSegmentConfined,
  /// isBetween(nextS, curPos, newEp) over every own position, as written in
  /// the pseudocode. Kept for comparison; it sends redundant copies.
  kLiteral,
};

struct RoutingEntry {
  /// Next ccw subscriber position. Equal to the entry's own position while
  /// no subscriber is known.
  Position next_subscriber;
  Tick renewed_at = 0;
  /// Replacement candidate collected while the entry is stale.
  std::optional<Position> pending;

  friend bool operator==(const RoutingEntry&, const RoutingEntry&) = default;
};

/// Channel × own-position matrix of routing entries.
class RoutingTable {
 public:
  RoutingTable() = default;
  RoutingTable(std::size_t channel_count, std::span<const Position> own, Tick now);

  std::size_t channel_count() const { return channels_; }
  std::size_t position_count() const { return columns_; }

  RoutingEntry& at(ChannelId c, std::size_t j) { return cells_.at(c * columns_ + j); }
  const RoutingEntry& at(ChannelId c, std::size_t j) const { return cells_.at(c * columns_ + j); }
  std::span<RoutingEntry> row(ChannelId c) { return std::span(cells_).subspan(c * columns_, columns_); }

  friend bool operator==(const RoutingTable&, const RoutingTable&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t columns_ = 0;
  std::vector<RoutingEntry> cells_;
};

/// Folds subscriber positions `sp` into one channel row whose entries
/// belong to the sorted positions `own`. Candidates inside (own, next] take
/// over the entry and renew it; stale entries collect the closest candidate
/// as pending instead.
void fold_subscriber_positions(std::span<const Position> own, std::span<RoutingEntry> row,
                               std::span<const Position> sp, std::size_t ring_length, Tick now, Tick lease_period);

struct TreeLinks {
  std::optional<NodeId> parent;
  std::vector<NodeId> children;

  std::size_t num_children() const { return children.size(); }
};

/// One publication copy leaving a node.
struct Forward {
  Position from;
  PubMsg msg;
};

struct PubResult {
  bool delivered = false;
  /// Set when the goal is not one of this node's positions or the channel is unknown.
  bool dropped = false;
  std::vector<Forward> forwards;
};

struct CleanReport {
  /// Stale entries replaced by their pending value.
  std::size_t written_back = 0;
  /// Stale entries with no pending value, reset to "no subscriber known".
  std::size_t expired = 0;
};

/// A cancellable one-shot timer. Each (re)arm bumps the generation so stale
/// expiry events can be recognised and ignored.
struct TimerState {
  std::optional<Tick> deadline;
  std::uint64_t generation = 0;

  void arm(Tick at) {
    deadline = at;
    ++generation;
  }
  void disarm() {
    deadline.reset();
    ++generation;
  }
};

/// Publish/subscribe participant on the virtual ring.
///
/// All time comes in through `now` arguments; methods return the messages
/// the node wants sent and never perform I/O.
class PsvrNode {
 public:
  PsvrNode(NodeId id, std::shared_ptr<const VirtualRing> ring, TreeLinks links, std::size_t channel_count,
           LeaseTimings timings, Tick now, ForwardingRule rule = ForwardingRule::kSegmentConfined,
           std::optional<NodeId> ring_slot = std::nullopt);

  /// Adds `c` to the subscription set and fires the subscription timer now
  /// if it was not there yet. Throws ProtocolError for undeclared channels.
  void subscribe(ChannelId c, Tick now);
  /// Removes `c`. Once the set is empty the next timer expiry goes silent.
  void unsubscribe(ChannelId c);

  /// Re-arms after δ_S and returns the SUB to broadcast, or disarms and
  /// returns nothing when the node has no subscriptions left.
  std::optional<SubMsg> on_timer_sub(Tick now);

  /// Applies a SUB received from tree neighbour `from`; returns the SUB to
  /// re-broadcast, if any.
  std::optional<SubMsg> on_sub(const SubMsg& msg, NodeId from, Tick now);

  /// Folds subscriber positions `sp` into the channel's routing row.
  void upd_sn(ChannelId c, std::span<const Position> sp, Tick now);

  CleanReport on_timer_clean(Tick now);

  /// Copies to send for a new publication. Throws ProtocolError for undeclared channels.
  std::vector<Forward> publish(ChannelId c, Payload data, PubMeta meta) const;
  PubResult on_pub(const PubMsg& msg) const;
  std::vector<Forward> handle_pub(Position cur, Position ep, ChannelId c, const Payload& data,
                                  const PubMeta& meta) const;
  Position calc_new_ep(Position p, Position max_ep) const;

  /// Fault injection: overwrite one entry as if it had just been renewed.
  void overwrite_entry(ChannelId c, std::size_t j, Position next_subscriber, Tick now);
  /// Ring rebuilt: adopt new positions, reset the routing table and, when
  /// subscribed, announce again right away. `ring_slot` is this node's id inside `ring`
  /// when the ring was built over relabelled nodes.
  void rebind(std::shared_ptr<const VirtualRing> ring, TreeLinks links, Tick now,
              std::optional<NodeId> ring_slot = std::nullopt);

  NodeId id() const { return id_; }
  std::span<const Position> positions() const { return positions_; }
  const std::set<ChannelId>& subscriptions() const { return subscriptions_; }
  bool subscribed(ChannelId c) const { return subscriptions_.contains(c); }
  const RoutingTable& table() const { return table_; }
  const TreeLinks& links() const { return links_; }
  const VirtualRing& ring() const { return *ring_; }
  const LeaseTimings& timings() const { return timings_; }
  const TimerState& sub_timer() const { return sub_timer_; }
  const TimerState& clean_timer() const { return clean_timer_; }
  bool owns(Position p) const;
  /// Index of `p` in positions(); `p` must be owned.
  std::size_t index_of(Position p) const;
  std::size_t malformed_subs() const { return malformed_subs_; }

 private:
  NodeId id_;
  std::shared_ptr<const VirtualRing> ring_;
  TreeLinks links_;
  std::vector<Position> positions_;
  std::size_t channel_count_;
  LeaseTimings timings_;
  ForwardingRule rule_;
  std::set<ChannelId> subscriptions_;
  RoutingTable table_;
  TimerState sub_timer_;
  TimerState clean_timer_;
  std::size_t malformed_subs_ = 0;
};

}  // namespace psvr
