#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "psvr/ids.hpp"

namespace psvr {

using Payload = std::vector<std::uint8_t>;

/// Subscription announcement distributed over the spanning tree.
struct SubMsg {
  /// Node that forwarded the message last; empty when sent by the subscriber.
  std::optional<NodeId> prev_sender;
  std::vector<ChannelId> channels;
  /// All positions of the originating subscriber.
  std::vector<Position> positions;

  friend bool operator==(const SubMsg&, const SubMsg&) = default;
};

/// Bookkeeping carried alongside a publication for the delivery checker.
/// Routing never reads it.
struct PubMeta {
  NodeId origin;
  std::uint32_t seq = 0;
  std::uint32_t hops = 0;

  friend bool operator==(const PubMeta&, const PubMeta&) = default;
};

struct PubMsg {
  Position goal;
  /// Exclusive ccw bound of the segment this copy may travel in.
  Position endpoint;
  ChannelId channel = 0;
  Payload data;
  PubMeta meta;

  friend bool operator==(const PubMsg&, const PubMsg&) = default;
};

enum class MsgType : std::uint8_t { kSub = 1, kPub = 2 };

/// SUB = [type:1][r:2][|C_S|:1][channels:1 each][|P|:1][positions:2 each],
/// little-endian; r = 0xFFFF encodes "no previous sender".
std::vector<std::uint8_t> encode(const SubMsg& msg);
/// PUB = [type:1][goal:2][ep:2][c:1][seq:4][origin:2][len:2][data].
std::vector<std::uint8_t> encode(const PubMsg& msg);

SubMsg decode_sub(std::span<const std::uint8_t> bytes);
/// Hop count is not on the wire and decodes as 0.
PubMsg decode_pub(std::span<const std::uint8_t> bytes);

std::size_t wire_size(const SubMsg& msg);
std::size_t wire_size(const PubMsg& msg);

}  // namespace psvr
