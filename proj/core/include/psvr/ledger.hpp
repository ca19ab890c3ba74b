#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "psvr/ids.hpp"

namespace psvr {

struct DeliveryRecord {
  NodeId node;
  std::uint32_t hops = 0;
  Tick time = 0;

  friend bool operator==(const DeliveryRecord&, const DeliveryRecord&) = default;
};

/// Everything that happened to one publication.
struct PublicationRecord {
  std::uint32_t id = 0;
  NodeId origin;
  ChannelId channel = 0;
  Tick time = 0;
  std::uint32_t epoch = 0;
  /// Nodes subscribed to the channel when it was published, publisher excluded.
  std::vector<NodeId> expected;
  std::vector<DeliveryRecord> deliveries;
  std::size_t transmissions = 0;
  std::size_t lost = 0;
  std::size_t bytes = 0;
  /// Shortcuts taken over a position of a subscribed node.
  std::size_t skips = 0;
  /// Copies whose goal lay beyond their own endpoint.
  std::size_t confinement_violations = 0;
  /// Copies discarded on arrival (goal not owned, node gone, ring rebuilt).
  std::size_t dropped = 0;

  /// Number of distinct nodes that delivered.
  std::size_t delivered() const;
  /// Deliveries beyond the first per node.
  std::size_t duplicates() const;
  std::uint32_t max_hops() const;
  std::size_t delivery_count(NodeId v) const;
  /// Every expected node delivered once and nobody else delivered.
  bool exactly_once() const;

  friend bool operator==(const PublicationRecord&, const PublicationRecord&) = default;
};

enum class EventKind {
  kFault,
  kEpoch,
  kWriteBack,
  kExpired,
  kLossChange,
  kDiagnostic,
  kSend,
  kDeliver,
};

std::string to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& text);

/// Non-publication occurrence. `value` is a kind-specific count or id.
struct LedgerEvent {
  Tick time = 0;
  EventKind kind = EventKind::kDiagnostic;
  NodeId node;
  std::int64_t value = 0;
  std::string detail;

  friend bool operator==(const LedgerEvent&, const LedgerEvent&) = default;
};

/// Append-only record of a simulation run.
class TraceLedger {
 public:
  PublicationRecord& open_publication(NodeId origin, ChannelId channel, Tick time, std::uint32_t epoch,
                                      std::vector<NodeId> expected);
  PublicationRecord& publication(std::uint32_t id) { return publications_.at(id); }
  void record(LedgerEvent event) { events_.push_back(std::move(event)); }
  void count_sub(std::size_t bytes, bool lost);

  const std::vector<PublicationRecord>& publications() const { return publications_; }
  const std::vector<LedgerEvent>& events() const { return events_; }
  std::size_t sub_transmissions() const { return sub_transmissions_; }
  std::size_t sub_lost() const { return sub_lost_; }
  std::size_t sub_bytes() const { return sub_bytes_; }
  std::size_t count(EventKind kind) const;

  /// One JSON object per line: publications first, then events, then totals.
  void write_jsonl(std::ostream& out) const;
  static TraceLedger read_jsonl(std::istream& in);
  /// `pub_id,channel,tx_count,delivered,dup_count,max_hops`
  void write_summary_csv(std::ostream& out) const;

  friend bool operator==(const TraceLedger&, const TraceLedger&) = default;

 private:
  std::vector<PublicationRecord> publications_;
  std::vector<LedgerEvent> events_;
  std::size_t sub_transmissions_ = 0;
  std::size_t sub_lost_ = 0;
  std::size_t sub_bytes_ = 0;
};

}  // namespace psvr
