#include "psvr/topology.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "psvr/errors.hpp"

namespace psvr {

namespace {

std::vector<std::vector<NodeId>> adjacency_of(std::size_t n, std::span<const Edge> edges) {
  std::vector<std::vector<NodeId>> adj(n);
  for (const auto& e : edges) {
    adj[e.u.value()].push_back(e.v);
    adj[e.v.value()].push_back(e.u);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

std::size_t reach_count(const std::vector<std::set<NodeId>>& adj) {
  if (adj.empty()) return 0;
  std::vector<char> seen(adj.size(), 0);
  std::vector<NodeId> stack{NodeId{0}};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    NodeId x = stack.back();
    stack.pop_back();
    for (NodeId y : adj[x.value()]) {
      if (!seen[y.value()]) {
        seen[y.value()] = 1;
        ++count;
        stack.push_back(y);
      }
    }
  }
  return count;
}

}  // namespace

Graph::Graph(std::size_t node_count, std::vector<Edge> edges) : edges_(std::move(edges)) {
  if (node_count == 0) throw GraphError("graph needs at least one node");
  for (const auto& e : edges_) {
    if (e.u == e.v) throw GraphError("self-loop at node " + std::to_string(e.u.value()));
    if (e.v.value() >= node_count) {
      throw GraphError("node id " + std::to_string(e.v.value()) + " out of range");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end()) {
    throw GraphError("duplicate edge " + std::to_string(dup->u.value()) + "-" + std::to_string(dup->v.value()));
  }
  if (!is_connected(node_count, edges_)) throw GraphError("graph is not connected");
  adjacency_ = adjacency_of(node_count, edges_);
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  if (a.value() >= node_count() || b.value() >= node_count()) return false;
  const auto& list = adjacency_[a.value()];
  return std::binary_search(list.begin(), list.end(), b);
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (const auto& list : adjacency_) best = std::max(best, list.size());
  return best;
}

bool is_connected(std::size_t node_count, std::span<const Edge> edges) {
  if (node_count == 0) return false;
  // Union-find.
  std::vector<std::uint32_t> parent(node_count);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::size_t components = node_count;
  for (const auto& e : edges) {
    auto a = find(e.u.value());
    auto b = find(e.v.value());
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

std::vector<std::size_t> bfs_distances(const Graph& g, NodeId source) {
  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.node_count(), kUnset);
  std::queue<NodeId> q;
  dist[source.value()] = 0;
  q.push(source);
  while (!q.empty()) {
    NodeId x = q.front();
    q.pop();
    for (NodeId y : g.neighbors(x)) {
      if (dist[y.value()] == kUnset) {
        dist[y.value()] = dist[x.value()] + 1;
        q.push(y);
      }
    }
  }
  return dist;
}

Graph generate_er(std::size_t n, double p, std::uint64_t seed) {
  if (n < 2) throw GenerationError("G(n,p) needs n >= 2");
  if (!(p > 0.0 && p <= 1.0)) throw GenerationError("edge probability must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  for (int attempt = 0; attempt < kErRetryBudget; ++attempt) {
    std::vector<Edge> edges;
    for (std::uint32_t u = 0; u < n; ++u) {
      for (std::uint32_t v = u + 1; v < n; ++v) {
        if (coin(rng)) edges.emplace_back(NodeId{u}, NodeId{v});
      }
    }
    if (is_connected(n, edges)) return Graph(n, std::move(edges));
  }
  std::ostringstream msg;
  msg << "no connected G(" << n << ", " << p << ") sample after " << kErRetryBudget << " attempts";
  throw GenerationError(msg.str());
}

LinkSelection select_links(const Graph& g, std::size_t degree_cap, std::uint64_t seed) {
  if (degree_cap < 2) throw SelectionError("degree cap must be at least 2");
  const std::size_t n = g.node_count();

  std::vector<std::uint32_t> rank(n);
  std::iota(rank.begin(), rank.end(), 0u);
  std::mt19937_64 rng(seed);
  std::shuffle(rank.begin(), rank.end(), rng);

  std::vector<std::set<NodeId>> adj(n);
  for (const auto& e : g.edges()) {
    adj[e.u.value()].insert(e.v);
    adj[e.v.value()].insert(e.u);
  }

  for (;;) {
    std::optional<NodeId> worst;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (adj[v].size() <= degree_cap) continue;
      if (!worst || adj[v].size() > adj[worst->value()].size() ||
          (adj[v].size() == adj[worst->value()].size() && rank[v] < rank[worst->value()])) {
        worst = NodeId{v};
      }
    }
    if (!worst) break;

    std::vector<NodeId> candidates(adj[worst->value()].begin(), adj[worst->value()].end());
    std::sort(candidates.begin(), candidates.end(), [&](NodeId a, NodeId b) {
      if (adj[a.value()].size() != adj[b.value()].size()) return adj[a.value()].size() > adj[b.value()].size();
      return rank[a.value()] < rank[b.value()];
    });

    bool removed = false;
    for (NodeId other : candidates) {
      adj[worst->value()].erase(other);
      adj[other.value()].erase(*worst);
      if (reach_count(adj) == n) {
        removed = true;
        break;
      }
      adj[worst->value()].insert(other);
      adj[other.value()].insert(*worst);
    }
    if (!removed) {
      throw SelectionError("node " + std::to_string(worst->value()) + " cannot be reduced to degree " +
                           std::to_string(degree_cap) + " without disconnecting the graph");
    }
  }

  std::vector<Edge> kept;
  for (std::uint32_t u = 0; u < n; ++u) {
    for (NodeId v : adj[u]) {
      if (u < v.value()) kept.emplace_back(NodeId{u}, v);
    }
  }
  return LinkSelection{g, Graph(n, std::move(kept)), degree_cap};
}

LinkSelection keep_all_links(const Graph& g) {
  return LinkSelection{g, g, std::max<std::size_t>(g.max_degree(), 2)};
}

SpanningTree::SpanningTree(NodeId root, std::vector<std::optional<NodeId>> parent)
    : root_(root), parent_(std::move(parent)), children_(parent_.size()), depth_(parent_.size(), 0) {
  const std::size_t n = parent_.size();
  if (root.value() >= n) throw GraphError("tree root out of range");
  if (parent_[root.value()]) throw GraphError("tree root must not have a parent");
  for (std::uint32_t v = 0; v < n; ++v) {
    if (v == root.value()) continue;
    const auto& p = parent_[v];
    if (!p) throw GraphError("node " + std::to_string(v) + " has no parent");
    if (p->value() >= n || p->value() == v) throw GraphError("bad parent for node " + std::to_string(v));
    children_[p->value()].push_back(NodeId{v});
  }
  for (auto& c : children_) std::sort(c.begin(), c.end());

  // Depths by walking down from the root; also proves acyclicity.
  std::size_t visited = 0;
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    NodeId x = stack.back();
    stack.pop_back();
    ++visited;
    for (NodeId c : children_[x.value()]) {
      depth_[c.value()] = depth_[x.value()] + 1;
      stack.push_back(c);
    }
  }
  if (visited != n) throw GraphError("parent links do not form a tree");
}

std::vector<NodeId> SpanningTree::neighbors(NodeId v) const {
  std::vector<NodeId> out;
  if (auto p = parent(v)) out.push_back(*p);
  auto c = children(v);
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

std::size_t SpanningTree::degree(NodeId v) const { return children(v).size() + (parent(v) ? 1 : 0); }

bool SpanningTree::is_tree_edge(NodeId a, NodeId b) const { return parent(a) == b || parent(b) == a; }

std::size_t SpanningTree::height() const { return *std::max_element(depth_.begin(), depth_.end()); }

std::vector<Edge> SpanningTree::edges() const {
  std::vector<Edge> out;
  for (std::uint32_t v = 0; v < parent_.size(); ++v) {
    if (parent_[v]) out.emplace_back(NodeId{v}, *parent_[v]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SpanningTree build_tree(const Graph& kept, NodeId root) {
  if (root.value() >= kept.node_count()) throw GraphError("tree root out of range");
  std::vector<std::optional<NodeId>> parent(kept.node_count());
  std::vector<char> seen(kept.node_count(), 0);
  std::queue<NodeId> q;
  seen[root.value()] = 1;
  q.push(root);
  while (!q.empty()) {
    NodeId x = q.front();
    q.pop();
    for (NodeId y : kept.neighbors(x)) {
      if (!seen[y.value()]) {
        seen[y.value()] = 1;
        parent[y.value()] = x;
        q.push(y);
      }
    }
  }
  return SpanningTree(root, std::move(parent));
}

NodeId central_node(const Graph& g) {
  NodeId best{0};
  std::size_t best_ecc = std::numeric_limits<std::size_t>::max();
  for (std::uint32_t v = 0; v < g.node_count(); ++v) {
    auto dist = bfs_distances(g, NodeId{v});
    std::size_t ecc = *std::max_element(dist.begin(), dist.end());
    if (ecc < best_ecc) {
      best_ecc = ecc;
      best = NodeId{v};
    }
  }
  return best;
}

Graph read_graph(std::istream& in) {
  long long n = 0;
  long long m = 0;
  if (!(in >> n >> m) || n <= 0 || m < 0) throw GraphError("graph header must be `n m` with n > 0, m >= 0");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    long long u = -1;
    long long v = -1;
    if (!(in >> u >> v)) throw GraphError("expected " + std::to_string(m) + " edges, got " + std::to_string(i));
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw GraphError("edge " + std::to_string(i) + " references a node outside 0.." + std::to_string(n - 1));
    }
    edges.emplace_back(NodeId{static_cast<std::uint32_t>(u)}, NodeId{static_cast<std::uint32_t>(v)});
  }
  return Graph(static_cast<std::size_t>(n), std::move(edges));
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.node_count() << ' ' << g.edge_count() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

}  // namespace psvr
