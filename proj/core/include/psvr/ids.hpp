#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace psvr {

/// Thin wrapper that keeps node ids and ring positions from mixing.
template <class Tag>
class Id {
 public:
  using value_type = std::uint32_t;

  constexpr Id() = default;
  constexpr explicit Id(value_type v) : value_(v) {}

  constexpr value_type value() const { return value_; }

  friend constexpr auto operator<=>(Id, Id) = default;
  friend std::ostream& operator<<(std::ostream& os, Id id) { return os << id.value_; }

 private:
  value_type value_ = 0;
};

using NodeId = Id<struct NodeTag>;
using Position = Id<struct PositionTag>;

/// Channels are declared up front; wire format carries them in one byte.
using ChannelId = std::uint8_t;

/// Virtual time in abstract ticks.
using Tick = std::int64_t;

}  // namespace psvr

template <class Tag>
struct std::hash<psvr::Id<Tag>> {
  std::size_t operator()(psvr::Id<Tag> id) const noexcept { return std::hash<std::uint32_t>{}(id.value()); }
};
