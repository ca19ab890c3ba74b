#include "psvr/ledger.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "psvr/errors.hpp"

namespace psvr {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<EventKind, const char*>, 8> kKindNames{{
    {EventKind::kFault, "fault"},
    {EventKind::kEpoch, "epoch"},
    {EventKind::kWriteBack, "writeback"},
    {EventKind::kExpired, "expired"},
    {EventKind::kLossChange, "loss"},
    {EventKind::kDiagnostic, "diagnostic"},
    {EventKind::kSend, "send"},
    {EventKind::kDeliver, "deliver"},
}};

std::map<NodeId, std::size_t> tally(const PublicationRecord& rec) {
  std::map<NodeId, std::size_t> counts;
  for (const auto& d : rec.deliveries) ++counts[d.node];
  return counts;
}

json to_json(const PublicationRecord& rec) {
  json expected = json::array();
  for (NodeId v : rec.expected) expected.push_back(v.value());
  json deliveries = json::array();
  for (const auto& d : rec.deliveries) deliveries.push_back({d.node.value(), d.hops, d.time});
  return {{"type", "pub"},
          {"id", rec.id},
          {"origin", rec.origin.value()},
          {"channel", rec.channel},
          {"time", rec.time},
          {"epoch", rec.epoch},
          {"expected", expected},
          {"deliveries", deliveries},
          {"tx", rec.transmissions},
          {"lost", rec.lost},
          {"bytes", rec.bytes},
          {"skips", rec.skips},
          {"confinement", rec.confinement_violations},
          {"dropped", rec.dropped}};
}

PublicationRecord publication_from_json(const json& j) {
  PublicationRecord rec;
  rec.id = j.at("id").get<std::uint32_t>();
  rec.origin = NodeId{j.at("origin").get<std::uint32_t>()};
  rec.channel = j.at("channel").get<ChannelId>();
  rec.time = j.at("time").get<Tick>();
  rec.epoch = j.at("epoch").get<std::uint32_t>();
  for (const auto& v : j.at("expected")) rec.expected.emplace_back(v.get<std::uint32_t>());
  for (const auto& d : j.at("deliveries")) {
    rec.deliveries.push_back({NodeId{d.at(0).get<std::uint32_t>()}, d.at(1).get<std::uint32_t>(), d.at(2).get<Tick>()});
  }
  rec.transmissions = j.at("tx").get<std::size_t>();
  rec.lost = j.at("lost").get<std::size_t>();
  rec.bytes = j.at("bytes").get<std::size_t>();
  rec.skips = j.at("skips").get<std::size_t>();
  rec.confinement_violations = j.at("confinement").get<std::size_t>();
  rec.dropped = j.at("dropped").get<std::size_t>();
  return rec;
}

}  // namespace

std::size_t PublicationRecord::delivered() const { return tally(*this).size(); }

std::size_t PublicationRecord::duplicates() const { return deliveries.size() - delivered(); }

std::uint32_t PublicationRecord::max_hops() const {
  std::uint32_t best = 0;
  for (const auto& d : deliveries) best = std::max(best, d.hops);
  return best;
}

std::size_t PublicationRecord::delivery_count(NodeId v) const {
  return static_cast<std::size_t>(
      std::count_if(deliveries.begin(), deliveries.end(), [v](const auto& d) { return d.node == v; }));
}

bool PublicationRecord::exactly_once() const {
  const auto counts = tally(*this);
  if (counts.size() != expected.size()) return false;
  for (NodeId v : expected) {
    auto it = counts.find(v);
    if (it == counts.end() || it->second != 1) return false;
  }
  return true;
}

std::string to_string(EventKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

EventKind event_kind_from_string(const std::string& text) {
  for (const auto& [k, name] : kKindNames) {
    if (text == name) return k;
  }
  throw DecodeError("unknown event kind '" + text + "'");
}

PublicationRecord& TraceLedger::open_publication(NodeId origin, ChannelId channel, Tick time, std::uint32_t epoch,
                                                 std::vector<NodeId> expected) {
  PublicationRecord rec;
  rec.id = static_cast<std::uint32_t>(publications_.size());
  rec.origin = origin;
  rec.channel = channel;
  rec.time = time;
  rec.epoch = epoch;
  rec.expected = std::move(expected);
  publications_.push_back(std::move(rec));
  return publications_.back();
}

void TraceLedger::count_sub(std::size_t bytes, bool lost) {
  ++sub_transmissions_;
  sub_bytes_ += bytes;
  if (lost) ++sub_lost_;
}

std::size_t TraceLedger::count(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events_.begin(), events_.end(), [kind](const auto& e) { return e.kind == kind; }));
}

void TraceLedger::write_jsonl(std::ostream& out) const {
  for (const auto& rec : publications_) out << to_json(rec).dump() << '\n';
  for (const auto& e : events_) {
    json j{{"type", "event"},
           {"time", e.time},
           {"kind", to_string(e.kind)},
           {"node", e.node.value()},
           {"value", e.value},
           {"detail", e.detail}};
    out << j.dump() << '\n';
  }
  json totals{{"type", "totals"},
              {"sub_tx", sub_transmissions_},
              {"sub_lost", sub_lost_},
              {"sub_bytes", sub_bytes_}};
  out << totals.dump() << '\n';
}

TraceLedger TraceLedger::read_jsonl(std::istream& in) {
  TraceLedger ledger;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "pub") {
        ledger.publications_.push_back(publication_from_json(j));
      } else if (type == "event") {
        ledger.events_.push_back({j.at("time").get<Tick>(), event_kind_from_string(j.at("kind").get<std::string>()),
                                  NodeId{j.at("node").get<std::uint32_t>()}, j.at("value").get<std::int64_t>(),
                                  j.at("detail").get<std::string>()});
      } else if (type == "totals") {
        ledger.sub_transmissions_ = j.at("sub_tx").get<std::size_t>();
        ledger.sub_lost_ = j.at("sub_lost").get<std::size_t>();
        ledger.sub_bytes_ = j.at("sub_bytes").get<std::size_t>();
      } else {
        throw DecodeError("unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw DecodeError("ledger line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ledger;
}

void TraceLedger::write_summary_csv(std::ostream& out) const {
  out << "pub_id,channel,tx_count,delivered,dup_count,max_hops\n";
  for (const auto& rec : publications_) {
    out << rec.id << ',' << static_cast<unsigned>(rec.channel) << ',' << rec.transmissions << ','
        << rec.delivered() << ',' << rec.duplicates() << ',' << rec.max_hops() << '\n';
  }
}

}  // namespace psvr
