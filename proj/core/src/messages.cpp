#include "psvr/messages.hpp"

#include <limits>
#include <string>

#include "psvr/errors.hpp"

namespace psvr {

namespace {

constexpr std::uint16_t kNoSender = 0xFFFF;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint32_t v) {
    if (v > std::numeric_limits<std::uint16_t>::max()) throw ProtocolError("value does not fit 16 bits");
    out_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[at_++];
  }
  std::uint16_t u16() {
    need(2);
    auto v = static_cast<std::uint16_t>(in_[at_] | (in_[at_ + 1] << 8));
    at_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[at_ + i]) << (8 * i);
    at_ += 4;
    return v;
  }
  void finish() const {
    if (at_ != in_.size()) throw DecodeError(std::to_string(in_.size() - at_) + " trailing bytes");
  }

 private:
  void need(std::size_t k) const {
    if (at_ + k > in_.size()) throw DecodeError("truncated message");
  }

  std::span<const std::uint8_t> in_;
  std::size_t at_ = 0;
};

void check_count(std::size_t count, const char* what) {
  if (count > 0xFF) throw ProtocolError(std::string(what) + " count does not fit one byte");
}

}  // namespace

std::vector<std::uint8_t> encode(const SubMsg& msg) {
  check_count(msg.channels.size(), "channel");
  check_count(msg.positions.size(), "position");
  Writer w;
  w.u8(static_cast<std::uint8_t>(MsgType::kSub));
  w.u16(msg.prev_sender ? msg.prev_sender->value() : kNoSender);
  w.u8(static_cast<std::uint8_t>(msg.channels.size()));
  for (ChannelId c : msg.channels) w.u8(c);
  w.u8(static_cast<std::uint8_t>(msg.positions.size()));
  for (Position p : msg.positions) w.u16(p.value());
  return w.take();
}

std::vector<std::uint8_t> encode(const PubMsg& msg) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(MsgType::kPub));
  w.u16(msg.goal.value());
  w.u16(msg.endpoint.value());
  w.u8(msg.channel);
  w.u32(msg.meta.seq);
  w.u16(msg.meta.origin.value());
  w.u16(static_cast<std::uint32_t>(msg.data.size()));
  auto out = w.take();
  out.insert(out.end(), msg.data.begin(), msg.data.end());
  return out;
}

SubMsg decode_sub(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.u8() != static_cast<std::uint8_t>(MsgType::kSub)) throw DecodeError("not a SUB message");
  SubMsg msg;
  if (auto sender = r.u16(); sender != kNoSender) msg.prev_sender = NodeId{sender};
  const auto nc = r.u8();
  for (int i = 0; i < nc; ++i) msg.channels.push_back(r.u8());
  const auto np = r.u8();
  for (int i = 0; i < np; ++i) msg.positions.emplace_back(r.u16());
  r.finish();
  return msg;
}

PubMsg decode_pub(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.u8() != static_cast<std::uint8_t>(MsgType::kPub)) throw DecodeError("not a PUB message");
  PubMsg msg;
  msg.goal = Position{r.u16()};
  msg.endpoint = Position{r.u16()};
  msg.channel = r.u8();
  msg.meta.seq = r.u32();
  msg.meta.origin = NodeId{r.u16()};
  const auto len = r.u16();
  for (int i = 0; i < len; ++i) msg.data.push_back(r.u8());
  r.finish();
  return msg;
}

std::size_t wire_size(const SubMsg& msg) { return 1 + 2 + 1 + msg.channels.size() + 1 + 2 * msg.positions.size(); }

std::size_t wire_size(const PubMsg& msg) { return 1 + 2 + 2 + 1 + 4 + 2 + 2 + msg.data.size(); }

}  // namespace psvr
