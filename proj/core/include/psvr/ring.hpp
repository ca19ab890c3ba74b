#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "psvr/ids.hpp"
#include "psvr/topology.hpp"

namespace psvr {

/// How one kept non-tree edge (u, v) is turned into position-level shortcuts.
enum class ShortcutMode {
  /// Every position of u links to every position of v and back.
  kAllPairs,
  /// Each position of u links only to the first position of v met walking
  /// ccw from it (and symmetrically for v).
  kNearestAhead,
};

/// Closed walk over a spanning tree, recorded by depth-first traversal, plus
/// the shortcut adjacency induced by kept edges that are not tree edges.
///
/// Position i holds node seq[i]; consecutive positions are tree neighbours.
/// Immutable once built.
class VirtualRing {
 public:
  static VirtualRing build(const SpanningTree& tree, const Graph& kept,
                           ShortcutMode mode = ShortcutMode::kAllPairs);

  std::size_t length() const { return seq_.size(); }
  std::size_t node_count() const { return positions_.size(); }

  NodeId at(Position p) const { return seq_.at(p.value()); }
  std::span<const NodeId> sequence() const { return seq_; }
  /// Positions of `v` in ccw (ascending) order.
  std::span<const Position> positions_of(NodeId v) const { return positions_.at(v.value()); }
  /// Shortcut targets reachable from `p` in one hop, ascending.
  std::span<const Position> shortcuts_from(Position p) const { return shortcuts_.at(p.value()); }
  bool has_shortcut(Position from, Position to) const;
  Position successor(Position p) const { return Position{static_cast<std::uint32_t>((p.value() + 1) % length())}; }
  std::size_t shortcut_count() const;

  /// Text dump: `l`, the sequence, `pos v: ...` lines, then `sc p: ...` lines
  /// for positions that have shortcuts.
  void dump(std::ostream& out) const;

 private:
  std::vector<NodeId> seq_;
  std::vector<std::vector<Position>> positions_;
  std::vector<std::vector<Position>> shortcuts_;
};

/// (to - from) mod l.
std::size_t ccw_dist(Position from, Position to, std::size_t length);

/// Membership of `test` in the ccw segment (left, right]. left == right means
/// the full ring, so the answer is true for every test position.
bool is_between(Position test, Position left, Position right, std::size_t length);

/// Farthest one-hop candidate from `p` (ring successor or a shortcut) that is
/// not past `goal`. The successor always qualifies, so a result exists.
Position get_pos_closest_to(const VirtualRing& ring, Position p, Position goal);

}  // namespace psvr
