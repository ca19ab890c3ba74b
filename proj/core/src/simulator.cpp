#include "psvr/simulator.hpp"

#include <algorithm>
#include <string>

#include "psvr/errors.hpp"

namespace psvr {

namespace {

constexpr std::uint64_t kLossStream = 0xd1b54a32d192ed03ULL;

Scenario validated(Scenario sc) {
  sc.validate();
  return sc;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Payload make_payload(std::size_t size, std::uint32_t seq) {
  Payload data(size);
  for (std::size_t i = 0; i < size; ++i) data[i] = static_cast<std::uint8_t>((seq + i) & 0xFF);
  return data;
}

}  // namespace

Simulator::Simulator(Scenario scenario)
    : scenario_(validated(std::move(scenario))),
      base_(base_graph(scenario_)),
      loss_(scenario_.loss),
      loss_rng_(scenario_.seed ^ kLossStream) {
  const std::size_t n = base_.node_count();
  present_.assign(n, true);
  for (NodeId v : scenario_.initially_absent) present_[v.value()] = false;
  node_to_slot_.assign(n, std::nullopt);
  psvr_.resize(n);
  shen_.resize(n);
  incarnation_.assign(n, 0);
  scheduled_sub_.assign(n, 0);
  scheduled_clean_.assign(n, 0);

  rebuild();
  timings_ = effective_timings(scenario_, instance_->ring->length());
  for (std::uint32_t v = 0; v < n; ++v) {
    if (present_[v]) create_node(NodeId{v});
  }

  // Corruption targets are only checkable up front when membership never changes.
  const bool churn = !scenario_.initially_absent.empty() ||
                     std::any_of(scenario_.faults.begin(), scenario_.faults.end(),
                                 [](const Fault& f) { return !std::holds_alternative<CorruptFault>(f.what); });
  if (!churn) {
    std::vector<FieldError> errors;
    for (std::size_t i = 0; i < scenario_.faults.size(); ++i) {
      const auto& c = std::get<CorruptFault>(scenario_.faults[i].what);
      const auto slot = *node_to_slot_[c.node.value()];
      const auto path = "faults[" + std::to_string(i) + "]";
      if (c.index >= instance_->ring->positions_of(slot).size()) {
        errors.push_back({path + ".index", "node has fewer positions"});
      }
      if (c.next_subscriber.value() >= instance_->ring->length()) {
        errors.push_back({path + ".ns", "position outside the ring"});
      }
    }
    if (!errors.empty()) throw ValidationError(std::move(errors));
  }

  for (const auto& s : scenario_.subscriptions) schedule(s.time, AppSubscription{s});
  for (const auto& p : expand_publications(scenario_)) schedule(p.time, AppPublication{p});
  for (std::size_t i = 0; i < scenario_.faults.size(); ++i) schedule(scenario_.faults[i].time, FaultFire{i});
  for (const auto& lc : scenario_.loss_schedule) schedule(lc.time, LossFire{lc.loss});
}

bool Simulator::active(NodeId v) const { return v.value() < present_.size() && present_[v.value()]; }

const PsvrNode& Simulator::psvr(NodeId v) const {
  if (!active(v) || !psvr_[v.value()]) throw ProtocolError("no ring node " + std::to_string(v.value()));
  return *psvr_[v.value()];
}

const ShenNode& Simulator::shen(NodeId v) const {
  if (!active(v) || !shen_[v.value()]) throw ProtocolError("no tree node " + std::to_string(v.value()));
  return *shen_[v.value()];
}

std::optional<NodeId> Simulator::slot_of(NodeId v) const {
  if (v.value() >= node_to_slot_.size()) return std::nullopt;
  return node_to_slot_[v.value()];
}

void Simulator::schedule(Tick at, EventBody what) { queue_.push(Event{at, next_seq_++, std::move(what)}); }

void Simulator::run() {
  run_until(scenario_.duration);
  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    if (auto* pub = std::get_if<PubArrival>(&ev.what)) {
      now_ = ev.time;
      handle(*pub);
    }
  }
}

void Simulator::run_until(Tick until) {
  while (!queue_.empty() && queue_.top().time <= until) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    dispatch(ev);
  }
  now_ = std::max(now_, until);
}

void Simulator::dispatch(Event& ev) {
  std::visit(Overloaded{[this](PubArrival& e) { handle(e); }, [this](SubArrival& e) { handle(e); },
                        [this](const auto& e) { handle(e); }},
             ev.what);
}

void Simulator::rebuild() {
  std::vector<NodeId> members;
  for (std::uint32_t v = 0; v < present_.size(); ++v) {
    if (present_[v]) members.emplace_back(v);
  }
  instance_.emplace(build_instance(scenario_, base_, members));
  std::fill(node_to_slot_.begin(), node_to_slot_.end(), std::nullopt);
  slot_to_node_ = members;
  for (std::uint32_t i = 0; i < members.size(); ++i) node_to_slot_[members[i].value()] = NodeId{i};
}

TreeLinks Simulator::links_of(NodeId v) const {
  const NodeId slot = *node_to_slot_[v.value()];
  TreeLinks links;
  if (auto p = instance_->tree.parent(slot)) links.parent = slot_to_node_[p->value()];
  for (NodeId c : instance_->tree.children(slot)) links.children.push_back(slot_to_node_[c.value()]);
  return links;
}

void Simulator::create_node(NodeId v) {
  const auto i = v.value();
  ++incarnation_[i];
  scheduled_sub_[i] = 0;
  scheduled_clean_[i] = 0;
  if (scenario_.protocol == Protocol::kPsvr) {
    psvr_[i] = std::make_unique<PsvrNode>(v, instance_->ring, links_of(v), scenario_.channels, timings_, now_,
                                          scenario_.forwarding, node_to_slot_[i]);
  } else {
    shen_[i] = std::make_unique<ShenNode>(v, links_of(v), scenario_.channels, timings_, now_);
  }
  sync_timers(v);
}

void Simulator::sync_timers(NodeId v) {
  const auto i = v.value();
  const TimerState* sub = nullptr;
  const TimerState* clean = nullptr;
  if (psvr_[i]) {
    sub = &psvr_[i]->sub_timer();
    clean = &psvr_[i]->clean_timer();
  } else if (shen_[i]) {
    sub = &shen_[i]->sub_timer();
    clean = &shen_[i]->clean_timer();
  } else {
    return;
  }
  if (sub->generation != scheduled_sub_[i]) {
    scheduled_sub_[i] = sub->generation;
    if (sub->deadline) schedule(*sub->deadline, TimerFire{v, false, incarnation_[i], sub->generation});
  }
  if (clean->generation != scheduled_clean_[i]) {
    scheduled_clean_[i] = clean->generation;
    if (clean->deadline) schedule(*clean->deadline, TimerFire{v, true, incarnation_[i], clean->generation});
  }
}

bool Simulator::draw_loss() {
  if (loss_ <= 0.0) return false;
  return std::bernoulli_distribution(loss_)(loss_rng_);
}

void Simulator::diagnose(NodeId v, std::string detail) {
  ledger_.record({now_, EventKind::kDiagnostic, v, 0, std::move(detail)});
}

bool Simulator::subscribed(NodeId v, ChannelId c) const {
  if (!active(v)) return false;
  if (psvr_[v.value()]) return psvr_[v.value()]->subscribed(c);
  if (shen_[v.value()]) return shen_[v.value()]->subscribed(c);
  return false;
}

std::vector<NodeId> Simulator::ground_truth(ChannelId c, std::optional<NodeId> except) const {
  std::vector<NodeId> out;
  for (std::uint32_t v = 0; v < present_.size(); ++v) {
    if (NodeId{v} != except && subscribed(NodeId{v}, c)) out.emplace_back(v);
  }
  return out;
}

void Simulator::broadcast_sub(NodeId from, const SubMsg& msg) {
  const TreeLinks& links = psvr_[from.value()] ? psvr_[from.value()]->links() : shen_[from.value()]->links();
  std::vector<NodeId> targets;
  if (links.parent) targets.push_back(*links.parent);
  targets.insert(targets.end(), links.children.begin(), links.children.end());
  const std::size_t bytes = wire_size(msg);
  for (NodeId to : targets) {
    const bool lost = draw_loss();
    ledger_.count_sub(bytes, lost);
    if (!lost) schedule(now_ + scenario_.hop_delay, SubArrival{to, from, msg, epoch_});
  }
}

void Simulator::send_ring(NodeId from, const Forward& fwd) {
  const VirtualRing& ring = *instance_->ring;
  const std::size_t l = ring.length();
  auto& rec = ledger_.publication(fwd.msg.meta.seq);
  ++rec.transmissions;
  rec.bytes += wire_size(fwd.msg);

  const std::size_t to_goal = ccw_dist(fwd.from, fwd.msg.goal, l);
  const std::size_t to_end = fwd.msg.endpoint == fwd.from ? l : ccw_dist(fwd.from, fwd.msg.endpoint, l);
  if (to_goal > to_end) ++rec.confinement_violations;
  if (fwd.msg.goal != ring.successor(fwd.from)) {
    for (std::size_t k = 1; k < to_goal; ++k) {
      const Position q{static_cast<std::uint32_t>((fwd.from.value() + k) % l)};
      if (subscribed(slot_to_node_[ring.at(q).value()], fwd.msg.channel)) {
        ++rec.skips;
        break;
      }
    }
  }

  const NodeId to = slot_to_node_[ring.at(fwd.msg.goal).value()];
  if (scenario_.trace) {
    ledger_.record({now_, EventKind::kSend, from, fwd.msg.meta.seq,
                    std::to_string(fwd.from.value()) + ">" + std::to_string(fwd.msg.goal.value()) + "/" +
                        std::to_string(fwd.msg.endpoint.value())});
  }
  if (draw_loss()) {
    ++rec.lost;
    return;
  }
  schedule(now_ + scenario_.hop_delay, PubArrival{to, from, fwd.msg, epoch_});
}

void Simulator::send_tree(NodeId from, const TreeForward& fwd) {
  auto& rec = ledger_.publication(fwd.msg.meta.seq);
  ++rec.transmissions;
  rec.bytes += wire_size(fwd.msg);
  if (scenario_.trace) {
    ledger_.record({now_, EventKind::kSend, from, fwd.msg.meta.seq,
                    std::to_string(from.value()) + ">" + std::to_string(fwd.to.value())});
  }
  if (draw_loss()) {
    ++rec.lost;
    return;
  }
  schedule(now_ + scenario_.hop_delay, PubArrival{fwd.to, from, fwd.msg, epoch_});
}

void Simulator::handle(PubArrival& ev) {
  auto& rec = ledger_.publication(ev.msg.meta.seq);
  if (ev.epoch != epoch_ || !active(ev.to)) {
    ++rec.dropped;
    return;
  }
  const auto i = ev.to.value();
  bool delivered = false;
  if (psvr_[i]) {
    PubResult result = psvr_[i]->on_pub(ev.msg);
    if (result.dropped) {
      ++rec.dropped;
      diagnose(ev.to, "publication goal " + std::to_string(ev.msg.goal.value()) + " not owned");
      return;
    }
    delivered = result.delivered;
    for (const auto& fwd : result.forwards) send_ring(ev.to, fwd);
  } else {
    TreePubResult result = shen_[i]->on_pub(ev.msg, ev.from);
    delivered = result.delivered;
    for (const auto& fwd : result.forwards) send_tree(ev.to, fwd);
  }
  if (delivered) {
    auto& target = ledger_.publication(ev.msg.meta.seq);
    target.deliveries.push_back({ev.to, ev.msg.meta.hops, now_});
    if (scenario_.trace) ledger_.record({now_, EventKind::kDeliver, ev.to, ev.msg.meta.seq, ""});
  }
}

void Simulator::handle(SubArrival& ev) {
  if (ev.epoch != epoch_ || !active(ev.to)) return;
  const auto i = ev.to.value();
  std::optional<SubMsg> out;
  std::size_t malformed_before = 0;
  if (psvr_[i]) {
    malformed_before = psvr_[i]->malformed_subs();
    out = psvr_[i]->on_sub(ev.msg, ev.from, now_);
    if (psvr_[i]->malformed_subs() != malformed_before) diagnose(ev.to, "malformed subscription dropped");
  } else {
    malformed_before = shen_[i]->malformed_subs();
    out = shen_[i]->on_sub(ev.msg, ev.from, now_);
    if (shen_[i]->malformed_subs() != malformed_before) diagnose(ev.to, "malformed subscription dropped");
  }
  if (out) broadcast_sub(ev.to, *out);
}

void Simulator::handle(const TimerFire& ev) {
  const auto i = ev.node.value();
  if (!active(ev.node) || incarnation_[i] != ev.incarnation) return;
  const TimerState& state = psvr_[i] ? (ev.clean ? psvr_[i]->clean_timer() : psvr_[i]->sub_timer())
                                     : (ev.clean ? shen_[i]->clean_timer() : shen_[i]->sub_timer());
  if (state.generation != ev.generation) return;

  if (ev.clean) {
    const CleanReport report = psvr_[i] ? psvr_[i]->on_timer_clean(now_) : shen_[i]->on_timer_clean(now_);
    if (report.written_back) {
      ledger_.record({now_, EventKind::kWriteBack, ev.node, static_cast<std::int64_t>(report.written_back), ""});
    }
    if (report.expired) {
      ledger_.record({now_, EventKind::kExpired, ev.node, static_cast<std::int64_t>(report.expired), ""});
    }
  } else {
    auto msg = psvr_[i] ? psvr_[i]->on_timer_sub(now_) : shen_[i]->on_timer_sub(now_);
    if (msg) broadcast_sub(ev.node, *msg);
  }
  sync_timers(ev.node);
}

void Simulator::handle(const AppSubscription& ev) {
  const auto& a = ev.action;
  if (!active(a.node)) {
    diagnose(a.node, "subscription action on absent node");
    return;
  }
  const auto i = a.node.value();
  if (psvr_[i]) {
    a.subscribe ? psvr_[i]->subscribe(a.channel, now_) : psvr_[i]->unsubscribe(a.channel);
  } else {
    a.subscribe ? shen_[i]->subscribe(a.channel, now_) : shen_[i]->unsubscribe(a.channel);
  }
  sync_timers(a.node);
}

void Simulator::handle(const AppPublication& ev) {
  const auto& p = ev.pub;
  if (!active(p.node)) {
    diagnose(p.node, "publication from absent node");
    return;
  }
  auto& rec = ledger_.open_publication(p.node, p.channel, now_, epoch_, ground_truth(p.channel, p.node));
  const PubMeta meta{p.node, rec.id, 0};
  const auto i = p.node.value();
  if (psvr_[i]) {
    for (const auto& fwd : psvr_[i]->publish(p.channel, make_payload(p.size, rec.id), meta)) send_ring(p.node, fwd);
  } else {
    for (const auto& fwd : shen_[i]->publish(p.channel, make_payload(p.size, rec.id), meta)) send_tree(p.node, fwd);
  }
}

void Simulator::handle(const FaultFire& ev) {
  const Fault& fault = scenario_.faults[ev.index];
  if (const auto* c = std::get_if<CorruptFault>(&fault.what)) {
    const auto i = c->node.value();
    if (!active(c->node) || !psvr_[i] || c->index >= psvr_[i]->positions().size() ||
        c->next_subscriber.value() >= instance_->ring->length()) {
      diagnose(c->node, "corruption target does not exist");
      return;
    }
    psvr_[i]->overwrite_entry(c->channel, c->index, c->next_subscriber, now_);
    ledger_.record({now_, EventKind::kFault, c->node, static_cast<std::int64_t>(c->next_subscriber.value()),
                    "corrupt"});
    return;
  }
  if (const auto* leave = std::get_if<LeaveFault>(&fault.what)) {
    const auto i = leave->node.value();
    std::erase(pending_joins_, leave->node);
    present_[i] = false;
    psvr_[i].reset();
    shen_[i].reset();
    ++incarnation_[i];
    ledger_.record({now_, EventKind::kFault, leave->node, 0, "leave"});
  } else {
    const NodeId v = std::get<JoinFault>(fault.what).node;
    pending_joins_.push_back(v);
    ledger_.record({now_, EventKind::kFault, v, 0, "join"});
  }
  schedule(now_ + scenario_.rebuild_latency, RebuildFire{});
}

void Simulator::handle(const RebuildFire&) {
  for (NodeId v : pending_joins_) present_[v.value()] = true;
  pending_joins_.clear();

  rebuild();
  ++epoch_;
  for (std::uint32_t v = 0; v < present_.size(); ++v) {
    if (!present_[v]) continue;
    const NodeId id{v};
    if (psvr_[v]) {
      psvr_[v]->rebind(instance_->ring, links_of(id), now_, node_to_slot_[v]);
      sync_timers(id);
    } else if (shen_[v]) {
      shen_[v]->rebind(links_of(id), now_);
      sync_timers(id);
    } else {
      create_node(id);
    }
  }
  ledger_.record({now_, EventKind::kEpoch, NodeId{}, static_cast<std::int64_t>(instance_->ring->length()),
                  "epoch " + std::to_string(epoch_)});
}

void Simulator::handle(const LossFire& ev) {
  loss_ = ev.loss;
  ledger_.record({now_, EventKind::kLossChange, NodeId{}, static_cast<std::int64_t>(ev.loss * 1e6), ""});
}

TraceLedger simulate(const Scenario& scenario) {
  Simulator sim(scenario);
  sim.run();
  return sim.take_ledger();
}

}  // namespace psvr
