#include "psvr/ring.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>

namespace psvr {

namespace {

void add_unique(std::vector<Position>& list, Position p) {
  auto it = std::lower_bound(list.begin(), list.end(), p);
  if (it == list.end() || *it != p) list.insert(it, p);
}

}  // namespace

VirtualRing VirtualRing::build(const SpanningTree& tree, const Graph& kept, ShortcutMode mode) {
  VirtualRing ring;
  const std::size_t n = tree.node_count();
  ring.positions_.resize(n);

  if (n == 1) {
    ring.seq_.push_back(tree.root());
  } else {
    // Iterative DFS; each frame remembers how many children were entered.
    struct Frame {
      NodeId node;
      std::size_t next_child;
    };
    std::vector<Frame> stack{{tree.root(), 0}};
    ring.seq_.push_back(tree.root());
    while (!stack.empty()) {
      auto& top = stack.back();
      auto kids = tree.children(top.node);
      if (top.next_child < kids.size()) {
        NodeId child = kids[top.next_child++];
        ring.seq_.push_back(child);
        stack.push_back({child, 0});
      } else {
        stack.pop_back();
        if (!stack.empty()) ring.seq_.push_back(stack.back().node);
      }
    }
    // The walk ends back at the root; that visit closes the ring.
    ring.seq_.pop_back();
  }

  for (std::uint32_t i = 0; i < ring.seq_.size(); ++i) {
    ring.positions_[ring.seq_[i].value()].push_back(Position{i});
  }

  const std::size_t l = ring.seq_.size();
  ring.shortcuts_.resize(l);
  auto link = [&](Position from, Position to) {
    if (ring.successor(from) != to && from != to) add_unique(ring.shortcuts_[from.value()], to);
  };
  auto nearest_ahead = [&](Position from, std::span<const Position> targets) {
    Position best = targets.front();
    for (Position t : targets) {
      if (ccw_dist(from, t, l) < ccw_dist(from, best, l)) best = t;
    }
    return best;
  };

  for (const auto& e : kept.edges()) {
    if (tree.is_tree_edge(e.u, e.v)) continue;
    auto pu = ring.positions_of(e.u);
    auto pv = ring.positions_of(e.v);
    switch (mode) {
      case ShortcutMode::kAllPairs:
        for (Position a : pu) {
          for (Position b : pv) {
            link(a, b);
            link(b, a);
          }
        }
        break;
      case ShortcutMode::kNearestAhead:
        for (Position a : pu) link(a, nearest_ahead(a, pv));
        for (Position b : pv) link(b, nearest_ahead(b, pu));
        break;
    }
  }
  return ring;
}

bool VirtualRing::has_shortcut(Position from, Position to) const {
  const auto& list = shortcuts_.at(from.value());
  return std::binary_search(list.begin(), list.end(), to);
}

std::size_t VirtualRing::shortcut_count() const {
  std::size_t total = 0;
  for (const auto& list : shortcuts_) total += list.size();
  return total;
}

void VirtualRing::dump(std::ostream& out) const {
  out << length() << '\n';
  for (std::size_t i = 0; i < seq_.size(); ++i) out << (i ? " " : "") << seq_[i];
  out << '\n';
  for (std::uint32_t v = 0; v < positions_.size(); ++v) {
    out << "pos " << v << ':';
    for (Position p : positions_[v]) out << ' ' << p;
    out << '\n';
  }
  for (std::uint32_t p = 0; p < shortcuts_.size(); ++p) {
    if (shortcuts_[p].empty()) continue;
    out << "sc " << p << ':';
    for (Position q : shortcuts_[p]) out << ' ' << q;
    out << '\n';
  }
}

std::size_t ccw_dist(Position from, Position to, std::size_t length) {
  return (to.value() + length - from.value()) % length;
}

bool is_between(Position test, Position left, Position right, std::size_t length) {
  if (left == right) return true;
  const auto d = ccw_dist(left, test, length);
  return d > 0 && d <= ccw_dist(left, right, length);
}

Position get_pos_closest_to(const VirtualRing& ring, Position p, Position goal) {
  const std::size_t l = ring.length();
  const std::size_t limit = ccw_dist(p, goal, l);
  Position best = ring.successor(p);
  std::size_t best_dist = 1;
  for (Position q : ring.shortcuts_from(p)) {
    const std::size_t d = ccw_dist(p, q, l);
    assert(d != best_dist);
    if (d <= limit && d > best_dist) {
      best = q;
      best_dist = d;
    }
  }
  return best;
}

}  // namespace psvr
