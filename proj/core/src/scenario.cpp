#include "psvr/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "psvr/errors.hpp"

namespace psvr {

namespace {

using nlohmann::json;

constexpr std::uint64_t kScheduleStream = 0x9e3779b97f4a7c15ULL;

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

/// Reads typed fields out of a JSON document and records type errors with
/// their path instead of stopping at the first one.
class Reader {
 public:
  explicit Reader(std::filesystem::path base_dir) : base_dir_(std::move(base_dir)) {}

  std::vector<FieldError>& errors() { return errors_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

  template <class T>
  std::optional<T> get(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return as<T>(*it, path);
  }

  template <class T>
  std::optional<T> as(const json& value, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (value.is_boolean()) return value.get<bool>();
      fail(path, "expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (value.is_string()) return value.get<std::string>();
      fail(path, "expected a string");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (value.is_number()) return value.get<T>();
      fail(path, "expected a number");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (value.is_number_unsigned()) return value.get<T>();
      fail(path, "expected a non-negative integer");
    } else {
      if (value.is_number_integer()) return value.get<T>();
      fail(path, "expected an integer");
    }
    return std::nullopt;
  }

  std::optional<NodeId> node(const json& obj, const std::string& key, const std::string& path) {
    auto v = get<std::uint32_t>(obj, key, path);
    if (!v) return std::nullopt;
    return NodeId{*v};
  }

  const json* array(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    if (!it->is_array()) {
      fail(path, "expected an array");
      return nullptr;
    }
    return &*it;
  }

  void fail(std::string path, std::string message) { errors_.push_back({std::move(path), std::move(message)}); }

 private:
  std::filesystem::path base_dir_;
  std::vector<FieldError> errors_;
};

ExplicitTopology read_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open graph file " + path.string());
  Graph g = read_graph(in);
  return ExplicitTopology{g.node_count(), {g.edges().begin(), g.edges().end()}};
}

void parse_topology(Reader& r, const json& doc, Scenario& sc) {
  auto it = doc.find("topology");
  if (it == doc.end() || !it->is_object()) {
    r.fail("topology", "missing topology object");
    return;
  }
  const json& t = *it;
  if (auto file = r.get<std::string>(t, "file", "topology.file")) {
    std::filesystem::path path(*file);
    if (path.is_relative()) path = r.base_dir() / path;
    try {
      sc.topology = read_graph_file(path);
    } catch (const Error& e) {
      r.fail("topology.file", e.what());
    }
    return;
  }
  auto nodes = r.get<std::size_t>(t, "nodes", "topology.nodes");
  if (!nodes) {
    r.fail("topology.nodes", "missing node count");
    return;
  }
  if (const json* edges = r.array(t, "edges", "topology.edges")) {
    ExplicitTopology topo{*nodes, {}};
    for (std::size_t i = 0; i < edges->size(); ++i) {
      const json& e = (*edges)[i];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned()) {
        r.fail(index_path("topology.edges", i), "expected a pair of node ids");
        continue;
      }
      topo.edges.emplace_back(NodeId{e[0].get<std::uint32_t>()}, NodeId{e[1].get<std::uint32_t>()});
    }
    sc.topology = std::move(topo);
    return;
  }
  GeneratedTopology gen{*nodes, 0.0};
  if (auto p = r.get<double>(t, "edge_prob", "topology.edge_prob")) {
    gen.edge_prob = *p;
  } else {
    r.fail("topology.edge_prob", "missing edge probability");
  }
  sc.topology = gen;
}

void parse_tree(Reader& r, const json& doc, Scenario& sc) {
  const json* tree = r.array(doc, "tree", "tree");
  if (!tree) return;
  std::vector<std::optional<NodeId>> parents;
  for (std::size_t i = 0; i < tree->size(); ++i) {
    const json& p = (*tree)[i];
    if (p.is_null()) {
      parents.emplace_back();
    } else if (p.is_number_unsigned()) {
      parents.emplace_back(NodeId{p.get<std::uint32_t>()});
    } else {
      r.fail(index_path("tree", i), "expected a parent id or null");
      parents.emplace_back();
    }
  }
  sc.tree = std::move(parents);
}

ChannelId channel_of(Reader& r, const json& obj, const std::string& path) {
  auto c = r.get<std::uint32_t>(obj, "channel", path + ".channel");
  if (!c) return 0;
  if (*c > 0xFF) {
    r.fail(path + ".channel", "channel id does not fit one byte");
    return 0;
  }
  return static_cast<ChannelId>(*c);
}

void parse_actions(Reader& r, const json& doc, Scenario& sc) {
  if (const json* subs = r.array(doc, "subscriptions", "subscriptions")) {
    for (std::size_t i = 0; i < subs->size(); ++i) {
      const std::string path = index_path("subscriptions", i);
      const json& s = (*subs)[i];
      SubscriptionAction a;
      a.time = r.get<Tick>(s, "time", path + ".time").value_or(0);
      if (auto n = r.node(s, "node", path + ".node")) {
        a.node = *n;
      } else {
        r.fail(path + ".node", "missing node");
      }
      const auto action = r.get<std::string>(s, "action", path + ".action").value_or("subscribe");
      if (action == "subscribe") {
        a.subscribe = true;
      } else if (action == "unsubscribe") {
        a.subscribe = false;
      } else {
        r.fail(path + ".action", "expected subscribe or unsubscribe");
      }
      a.channel = channel_of(r, s, path);
      sc.subscriptions.push_back(a);
    }
  }
  if (const json* pubs = r.array(doc, "publications", "publications")) {
    for (std::size_t i = 0; i < pubs->size(); ++i) {
      const std::string path = index_path("publications", i);
      const json& p = (*pubs)[i];
      Publication pub;
      pub.time = r.get<Tick>(p, "time", path + ".time").value_or(0);
      if (auto n = r.node(p, "node", path + ".node")) {
        pub.node = *n;
      } else {
        r.fail(path + ".node", "missing node");
      }
      pub.channel = channel_of(r, p, path);
      pub.size = r.get<std::size_t>(p, "size", path + ".size").value_or(0);
      sc.publications.push_back(pub);
    }
  }
  auto it = doc.find("publication_schedule");
  if (it != doc.end() && !it->is_null()) {
    const json& s = *it;
    const std::string path = "publication_schedule";
    PublicationSchedule ps;
    ps.start = r.get<Tick>(s, "start", path + ".start").value_or(0);
    ps.period = r.get<Tick>(s, "period", path + ".period").value_or(1);
    ps.stop = r.get<Tick>(s, "stop", path + ".stop").value_or(0);
    ps.channel = channel_of(r, s, path);
    ps.size = r.get<std::size_t>(s, "size", path + ".size").value_or(0);
    if (const json* list = r.array(s, "publishers", path + ".publishers")) {
      for (std::size_t i = 0; i < list->size(); ++i) {
        if (auto v = r.as<std::uint32_t>((*list)[i], index_path(path + ".publishers", i))) {
          ps.publishers.emplace_back(*v);
        }
      }
    }
    sc.schedule = ps;
  }
}

void parse_faults(Reader& r, const json& doc, Scenario& sc) {
  if (const json* list = r.array(doc, "loss_schedule", "loss_schedule")) {
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string path = index_path("loss_schedule", i);
      LossChange lc;
      lc.time = r.get<Tick>((*list)[i], "time", path + ".time").value_or(0);
      lc.loss = r.get<double>((*list)[i], "loss", path + ".loss").value_or(0.0);
      sc.loss_schedule.push_back(lc);
    }
  }
  if (const json* list = r.array(doc, "faults", "faults")) {
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string path = index_path("faults", i);
      const json& f = (*list)[i];
      Fault fault;
      fault.time = r.get<Tick>(f, "time", path + ".time").value_or(0);
      const auto node = r.node(f, "node", path + ".node");
      if (!node) r.fail(path + ".node", "missing node");
      const auto kind = r.get<std::string>(f, "kind", path + ".kind").value_or("");
      if (kind == "corrupt") {
        CorruptFault cf;
        cf.node = node.value_or(NodeId{});
        cf.channel = channel_of(r, f, path);
        cf.index = r.get<std::size_t>(f, "index", path + ".index").value_or(0);
        if (auto ns = r.get<std::uint32_t>(f, "ns", path + ".ns")) {
          cf.next_subscriber = Position{*ns};
        } else {
          r.fail(path + ".ns", "missing replacement position");
        }
        fault.what = cf;
      } else if (kind == "leave") {
        fault.what = LeaveFault{node.value_or(NodeId{})};
      } else if (kind == "join") {
        fault.what = JoinFault{node.value_or(NodeId{})};
      } else {
        r.fail(path + ".kind", "expected corrupt, leave or join");
        continue;
      }
      sc.faults.push_back(fault);
    }
  }
  if (const json* list = r.array(doc, "initially_absent", "initially_absent")) {
    for (std::size_t i = 0; i < list->size(); ++i) {
      if (auto v = r.as<std::uint32_t>((*list)[i], index_path("initially_absent", i))) {
        sc.initially_absent.emplace_back(*v);
      }
    }
  }
}

Scenario parse(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("$", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("$", "scenario must be a JSON object");

  Reader r(base_dir);
  Scenario sc;
  parse_topology(r, doc, sc);
  parse_tree(r, doc, sc);

  auto root_it = doc.find("root");
  if (root_it != doc.end() && !root_it->is_null()) {
    if (root_it->is_string() && root_it->get<std::string>() == "central") {
      sc.root.reset();
    } else if (root_it->is_number_unsigned()) {
      sc.root = NodeId{root_it->get<std::uint32_t>()};
    } else {
      r.fail("root", "expected \"central\" or a node id");
    }
  }
  sc.degree_cap = r.get<std::size_t>(doc, "degree_cap", "degree_cap").value_or(0);

  const auto shortcuts = r.get<std::string>(doc, "shortcuts", "shortcuts").value_or("all_pairs");
  if (shortcuts == "all_pairs") {
    sc.shortcuts = ShortcutMode::kAllPairs;
  } else if (shortcuts == "nearest_ahead") {
    sc.shortcuts = ShortcutMode::kNearestAhead;
  } else {
    r.fail("shortcuts", "expected all_pairs or nearest_ahead");
  }
  const auto forwarding = r.get<std::string>(doc, "forwarding", "forwarding").value_or("segment");
  if (forwarding == "segment") {
    sc.forwarding = ForwardingRule::kSegmentConfined;
  } else if (forwarding == "literal") {
    sc.forwarding = ForwardingRule::kLiteral;
  } else {
    r.fail("forwarding", "expected segment or literal");
  }
  const auto protocol = r.get<std::string>(doc, "protocol", "protocol").value_or("psvr");
  if (protocol == "psvr") {
    sc.protocol = Protocol::kPsvr;
  } else if (protocol == "shen") {
    sc.protocol = Protocol::kShen;
  } else {
    r.fail("protocol", "expected psvr or shen");
  }

  sc.channels = r.get<std::size_t>(doc, "channels", "channels").value_or(1);
  parse_actions(r, doc, sc);
  sc.loss = r.get<double>(doc, "loss", "loss").value_or(0.0);
  sc.hop_delay = r.get<Tick>(doc, "hop_delay", "hop_delay").value_or(1);
  sc.delta_s = r.get<Tick>(doc, "delta_s", "delta_s");
  sc.t_clean = r.get<Tick>(doc, "t_clean", "t_clean");
  sc.t_writeback = r.get<Tick>(doc, "t_writeback", "t_writeback");
  sc.duration = r.get<Tick>(doc, "duration", "duration").value_or(0);
  sc.seed = r.get<std::uint64_t>(doc, "seed", "seed").value_or(1);
  parse_faults(r, doc, sc);
  sc.rebuild_latency = r.get<Tick>(doc, "rebuild_latency", "rebuild_latency").value_or(0);
  sc.trace = r.get<bool>(doc, "trace", "trace").value_or(false);

  if (!r.errors().empty()) throw ValidationError(std::move(r.errors()));
  sc.validate();
  return sc;
}

void check_node(std::vector<FieldError>& errors, NodeId v, std::size_t n, const std::string& path) {
  if (v.value() >= n) errors.push_back({path, "node " + std::to_string(v.value()) + " does not exist"});
}

void check_channel(std::vector<FieldError>& errors, ChannelId c, std::size_t channels, const std::string& path) {
  if (c >= channels) errors.push_back({path, "channel " + std::to_string(c) + " is not declared"});
}

Graph induced(const Graph& base, const std::vector<NodeId>& nodes) {
  std::vector<std::optional<std::uint32_t>> slot(base.node_count());
  for (std::uint32_t i = 0; i < nodes.size(); ++i) slot[nodes[i].value()] = i;
  std::vector<Edge> edges;
  for (const auto& e : base.edges()) {
    if (slot[e.u.value()] && slot[e.v.value()]) edges.emplace_back(NodeId{*slot[e.u.value()]}, NodeId{*slot[e.v.value()]});
  }
  return Graph(nodes.size(), std::move(edges));
}

}  // namespace

std::size_t Scenario::node_count() const {
  return std::visit([](const auto& t) { return t.nodes; }, topology);
}

void Scenario::validate() const {
  std::vector<FieldError> errors;
  const std::size_t n = node_count();
  const bool explicit_topology = std::holds_alternative<ExplicitTopology>(topology);

  if (n < 2) errors.push_back({"topology.nodes", "at least 2 nodes are required"});
  if (const auto* gen = std::get_if<GeneratedTopology>(&topology)) {
    if (!(gen->edge_prob > 0.0 && gen->edge_prob <= 1.0)) {
      errors.push_back({"topology.edge_prob", "must lie in (0, 1]"});
    }
  } else if (n >= 2) {
    const auto& topo = std::get<ExplicitTopology>(topology);
    try {
      Graph(topo.nodes, topo.edges);
    } catch (const GraphError& e) {
      errors.push_back({"topology.edges", e.what()});
    }
  }

  if (tree) {
    if (tree->size() != n) {
      errors.push_back({"tree", "parent list must have one entry per node"});
    } else {
      const auto root_count = std::count(tree->begin(), tree->end(), std::nullopt);
      if (root_count != 1) {
        errors.push_back({"tree", "exactly one node must have no parent"});
      } else {
        const auto root_at = std::find(tree->begin(), tree->end(), std::nullopt) - tree->begin();
        try {
          const SpanningTree t(NodeId{static_cast<std::uint32_t>(root_at)}, *tree);
          if (const auto* topo = std::get_if<ExplicitTopology>(&topology)) {
            const std::set<Edge> listed(topo->edges.begin(), topo->edges.end());
            for (const Edge& e : t.edges()) {
              if (!listed.contains(e)) {
                errors.push_back({"tree", "tree edge " + std::to_string(e.u.value()) + "-" +
                                              std::to_string(e.v.value()) + " is not a topology edge"});
              }
            }
          }
        } catch (const Error& e) {
          errors.push_back({"tree", e.what()});
        }
        if (root && root->value() != static_cast<std::uint32_t>(root_at)) {
          errors.push_back({"root", "differs from the root of the explicit tree"});
        }
      }
      if (!explicit_topology) errors.push_back({"tree", "an explicit tree needs an explicit edge list"});
      if (!initially_absent.empty()) errors.push_back({"tree", "an explicit tree cannot have absent nodes"});
    }
  }
  if (root) check_node(errors, *root, n, "root");
  if (degree_cap == 1) errors.push_back({"degree_cap", "must be 0 (no cap) or at least 2"});
  if (channels == 0 || channels > 256) errors.push_back({"channels", "must lie in [1, 256]"});

  for (std::size_t i = 0; i < subscriptions.size(); ++i) {
    const auto path = index_path("subscriptions", i);
    check_node(errors, subscriptions[i].node, n, path + ".node");
    check_channel(errors, subscriptions[i].channel, channels, path + ".channel");
    if (subscriptions[i].time < 0) errors.push_back({path + ".time", "must be non-negative"});
  }
  for (std::size_t i = 0; i < publications.size(); ++i) {
    const auto path = index_path("publications", i);
    check_node(errors, publications[i].node, n, path + ".node");
    check_channel(errors, publications[i].channel, channels, path + ".channel");
    if (publications[i].time < 0) errors.push_back({path + ".time", "must be non-negative"});
    if (publications[i].size > 0xFFFF) errors.push_back({path + ".size", "payload exceeds 65535 bytes"});
  }
  if (schedule) {
    const std::string path = "publication_schedule";
    if (schedule->period <= 0) errors.push_back({path + ".period", "must be positive"});
    if (schedule->start < 0) errors.push_back({path + ".start", "must be non-negative"});
    if (schedule->stop < schedule->start) errors.push_back({path + ".stop", "must not precede start"});
    check_channel(errors, schedule->channel, channels, path + ".channel");
    if (schedule->size > 0xFFFF) errors.push_back({path + ".size", "payload exceeds 65535 bytes"});
    for (std::size_t i = 0; i < schedule->publishers.size(); ++i) {
      check_node(errors, schedule->publishers[i], n, index_path(path + ".publishers", i));
    }
  }

  if (!(loss >= 0.0 && loss <= 1.0)) errors.push_back({"loss", "must lie in [0, 1]"});
  for (std::size_t i = 0; i < loss_schedule.size(); ++i) {
    const auto path = index_path("loss_schedule", i);
    if (!(loss_schedule[i].loss >= 0.0 && loss_schedule[i].loss <= 1.0)) {
      errors.push_back({path + ".loss", "must lie in [0, 1]"});
    }
    if (loss_schedule[i].time < 0) errors.push_back({path + ".time", "must be non-negative"});
  }
  if (hop_delay < 1) errors.push_back({"hop_delay", "must be at least 1"});
  if (delta_s && *delta_s <= 0) errors.push_back({"delta_s", "must be positive"});
  if (t_clean && *t_clean <= 0) errors.push_back({"t_clean", "must be positive"});
  if (t_writeback && *t_writeback <= 0) errors.push_back({"t_writeback", "must be positive"});
  if (duration < 0) errors.push_back({"duration", "must be non-negative"});
  if (rebuild_latency < 0) errors.push_back({"rebuild_latency", "must be non-negative"});

  std::set<NodeId> absent;
  for (std::size_t i = 0; i < initially_absent.size(); ++i) {
    const auto path = index_path("initially_absent", i);
    check_node(errors, initially_absent[i], n, path);
    if (!absent.insert(initially_absent[i]).second) errors.push_back({path, "listed twice"});
  }

  // Replay membership changes in time order to catch impossible churn.
  std::vector<std::size_t> order(faults.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return faults[a].time < faults[b].time; });
  std::vector<std::pair<std::string, std::set<NodeId>>> memberships;
  bool churn = !absent.empty();
  for (std::size_t i : order) {
    const auto path = index_path("faults", i);
    const Fault& f = faults[i];
    if (f.time < 0) errors.push_back({path + ".time", "must be non-negative"});
    if (const auto* c = std::get_if<CorruptFault>(&f.what)) {
      check_node(errors, c->node, n, path + ".node");
      check_channel(errors, c->channel, channels, path + ".channel");
    } else if (const auto* leave = std::get_if<LeaveFault>(&f.what)) {
      check_node(errors, leave->node, n, path + ".node");
      if (!absent.insert(leave->node).second) errors.push_back({path + ".node", "node is already absent"});
      churn = true;
      memberships.emplace_back(path, absent);
    } else {
      const auto& join = std::get<JoinFault>(f.what);
      check_node(errors, join.node, n, path + ".node");
      if (absent.erase(join.node) == 0) errors.push_back({path + ".node", "node is already present"});
      churn = true;
      memberships.emplace_back(path, absent);
    }
  }
  if (churn && tree) errors.push_back({"tree", "an explicit tree cannot be combined with churn"});

  if (!errors.empty()) throw ValidationError(std::move(errors));
  if (!churn) return;

  // Every membership the run passes through must stay connected.
  const Graph base = base_graph(*this);
  auto check_membership = [&](const std::string& path, const std::set<NodeId>& gone) {
    std::vector<NodeId> present;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (!gone.contains(NodeId{v})) present.emplace_back(v);
    }
    if (present.size() < 2) {
      errors.push_back({path, "fewer than 2 nodes would remain"});
      return;
    }
    try {
      induced(base, present);
    } catch (const GraphError&) {
      errors.push_back({path, "remaining nodes would be disconnected"});
    }
  };
  check_membership("initially_absent", std::set<NodeId>(initially_absent.begin(), initially_absent.end()));
  for (const auto& [path, gone] : memberships) check_membership(path + ".node", gone);
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

Scenario Scenario::from_json(std::string_view text) { return parse(text, std::filesystem::current_path()); }

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("$", "cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.parent_path());
}

std::string Scenario::to_json() const {
  json doc;
  if (const auto* gen = std::get_if<GeneratedTopology>(&topology)) {
    doc["topology"] = {{"nodes", gen->nodes}, {"edge_prob", gen->edge_prob}};
  } else {
    const auto& topo = std::get<ExplicitTopology>(topology);
    json edges = json::array();
    for (const auto& e : topo.edges) edges.push_back({e.u.value(), e.v.value()});
    doc["topology"] = {{"nodes", topo.nodes}, {"edges", edges}};
  }
  if (tree) {
    json parents = json::array();
    for (const auto& p : *tree) parents.push_back(p ? json(p->value()) : json(nullptr));
    doc["tree"] = parents;
  }
  doc["root"] = root ? json(root->value()) : json("central");
  doc["degree_cap"] = degree_cap;
  doc["shortcuts"] = shortcuts == ShortcutMode::kAllPairs ? "all_pairs" : "nearest_ahead";
  doc["forwarding"] = forwarding == ForwardingRule::kSegmentConfined ? "segment" : "literal";
  doc["protocol"] = protocol == Protocol::kPsvr ? "psvr" : "shen";
  doc["channels"] = channels;

  json subs = json::array();
  for (const auto& s : subscriptions) {
    subs.push_back({{"time", s.time},
                    {"node", s.node.value()},
                    {"action", s.subscribe ? "subscribe" : "unsubscribe"},
                    {"channel", s.channel}});
  }
  doc["subscriptions"] = subs;
  json pubs = json::array();
  for (const auto& p : publications) {
    pubs.push_back({{"time", p.time}, {"node", p.node.value()}, {"channel", p.channel}, {"size", p.size}});
  }
  doc["publications"] = pubs;
  if (schedule) {
    json publishers = json::array();
    for (NodeId v : schedule->publishers) publishers.push_back(v.value());
    doc["publication_schedule"] = {{"start", schedule->start},     {"period", schedule->period},
                                   {"stop", schedule->stop},       {"channel", schedule->channel},
                                   {"size", schedule->size},       {"publishers", publishers}};
  }
  doc["loss"] = loss;
  json losses = json::array();
  for (const auto& lc : loss_schedule) losses.push_back({{"time", lc.time}, {"loss", lc.loss}});
  doc["loss_schedule"] = losses;
  doc["hop_delay"] = hop_delay;
  if (delta_s) doc["delta_s"] = *delta_s;
  if (t_clean) doc["t_clean"] = *t_clean;
  if (t_writeback) doc["t_writeback"] = *t_writeback;
  doc["duration"] = duration;
  doc["seed"] = seed;

  json fault_list = json::array();
  for (const auto& f : faults) {
    json entry{{"time", f.time}};
    if (const auto* c = std::get_if<CorruptFault>(&f.what)) {
      entry["kind"] = "corrupt";
      entry["node"] = c->node.value();
      entry["channel"] = c->channel;
      entry["index"] = c->index;
      entry["ns"] = c->next_subscriber.value();
    } else if (const auto* leave = std::get_if<LeaveFault>(&f.what)) {
      entry["kind"] = "leave";
      entry["node"] = leave->node.value();
    } else {
      entry["kind"] = "join";
      entry["node"] = std::get<JoinFault>(f.what).node.value();
    }
    fault_list.push_back(entry);
  }
  doc["faults"] = fault_list;
  json absent = json::array();
  for (NodeId v : initially_absent) absent.push_back(v.value());
  doc["initially_absent"] = absent;
  doc["rebuild_latency"] = rebuild_latency;
  doc["trace"] = trace;
  return doc.dump(2);
}

Graph base_graph(const Scenario& sc) {
  if (const auto* gen = std::get_if<GeneratedTopology>(&sc.topology)) {
    return generate_er(gen->nodes, gen->edge_prob, sc.seed);
  }
  const auto& topo = std::get<ExplicitTopology>(sc.topology);
  return Graph(topo.nodes, topo.edges);
}

Instance build_instance(const Scenario& sc, const Graph& base, const std::vector<NodeId>& nodes) {
  const bool whole = nodes.size() == base.node_count();
  Graph graph = whole ? base : induced(base, nodes);
  LinkSelection links = sc.degree_cap ? select_links(graph, sc.degree_cap, sc.seed) : keep_all_links(graph);

  auto make_tree = [&]() -> SpanningTree {
    if (whole && sc.tree) {
      const auto root_at = std::find(sc.tree->begin(), sc.tree->end(), std::nullopt) - sc.tree->begin();
      SpanningTree tree(NodeId{static_cast<std::uint32_t>(root_at)}, *sc.tree);
      for (const auto& e : tree.edges()) {
        if (!links.kept.has_edge(e.u, e.v)) {
          throw ValidationError("tree", "tree edge " + std::to_string(e.u.value()) + "-" +
                                              std::to_string(e.v.value()) + " is not a kept link");
        }
      }
      return tree;
    }
    std::optional<NodeId> root;
    if (sc.root) {
      auto it = std::lower_bound(nodes.begin(), nodes.end(), *sc.root);
      if (it != nodes.end() && *it == *sc.root) root = NodeId{static_cast<std::uint32_t>(it - nodes.begin())};
    }
    return build_tree(links.kept, root.value_or(central_node(links.kept)));
  };
  SpanningTree tree = make_tree();
  auto ring = std::make_shared<const VirtualRing>(VirtualRing::build(tree, links.kept, sc.shortcuts));
  return Instance{std::move(links), std::move(tree), std::move(ring)};
}

std::vector<Publication> expand_publications(const Scenario& sc) {
  std::vector<Publication> out = sc.publications;
  if (sc.schedule) {
    const auto& s = *sc.schedule;
    std::mt19937_64 rng(sc.seed ^ kScheduleStream);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(sc.node_count() - 1));
    std::size_t k = 0;
    for (Tick t = s.start; t < s.stop; t += s.period, ++k) {
      NodeId who = s.publishers.empty() ? NodeId{pick(rng)} : s.publishers[k % s.publishers.size()];
      out.push_back(Publication{t, who, s.channel, s.size});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
  return out;
}

LeaseTimings effective_timings(const Scenario& sc, std::size_t ring_length) {
  LeaseTimings t = LeaseTimings::defaults_for(ring_length, sc.hop_delay);
  if (sc.delta_s) {
    t.lease_period = *sc.delta_s;
    t.clean_period = std::max<Tick>(t.lease_period / 4, 1);
    t.write_back = 2 * t.lease_period;
  }
  if (sc.t_clean) t.clean_period = *sc.t_clean;
  if (sc.t_writeback) t.write_back = *sc.t_writeback;
  return t;
}

}  // namespace psvr
