#include <algorithm>
#include <cstring>

#include "ab3/error.hpp"
#include "ab3/transport.hpp"

namespace ab3 {

namespace {

template <typename T>
void put_le(std::uint8_t* dst, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

template <typename T>
T get_le(const std::uint8_t* src) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(src[i]) << (8 * i);
  return v;
}

}  // namespace

WireMessage WireMessage::tensor(std::uint64_t session_id, std::uint64_t sequence,
                                std::span<const u64> words) {
  WireMessage m;
  m.header.msg_type = MsgType::kTensor;
  m.header.session_id = session_id;
  m.header.sequence = sequence;
  m.payload.resize(words.size() * 8);
  for (std::size_t i = 0; i < words.size(); ++i) put_le(m.payload.data() + 8 * i, words[i]);
  m.header.payload_len = static_cast<std::uint32_t>(m.payload.size());
  return m;
}

std::vector<u64> WireMessage::words() const {
  require(payload.size() % 8 == 0, ErrorKind::kFraming, "payload is not word aligned");
  std::vector<u64> out(payload.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = get_le<u64>(payload.data() + 8 * i);
  return out;
}

void encode_header(const WireHeader& h, std::span<std::uint8_t, kWireHeaderSize> out) {
  std::copy(kWireMagic.begin(), kWireMagic.end(), out.begin());
  out[4] = h.version;
  out[5] = static_cast<std::uint8_t>(h.msg_type);
  put_le<std::uint16_t>(out.data() + 6, h.reserved);
  put_le<std::uint64_t>(out.data() + 8, h.session_id);
  put_le<std::uint64_t>(out.data() + 16, h.sequence);
  put_le<std::uint32_t>(out.data() + 24, h.payload_len);
}

WireHeader decode_header(std::span<const std::uint8_t, kWireHeaderSize> in) {
  require(std::equal(kWireMagic.begin(), kWireMagic.end(), in.begin()), ErrorKind::kFraming,
          "bad magic");
  WireHeader h;
  h.version = in[4];
  require(in[5] <= 1, ErrorKind::kFraming, "unknown msg_type " + std::to_string(in[5]));
  h.msg_type = static_cast<MsgType>(in[5]);
  h.reserved = get_le<std::uint16_t>(in.data() + 6);
  require(h.reserved == 0, ErrorKind::kFraming, "reserved field must be zero");
  h.session_id = get_le<std::uint64_t>(in.data() + 8);
  h.sequence = get_le<std::uint64_t>(in.data() + 16);
  h.payload_len = get_le<std::uint32_t>(in.data() + 24);
  if (h.msg_type == MsgType::kTensor)
    require(h.payload_len % 8 == 0, ErrorKind::kFraming,
            "tensor payload_len " + std::to_string(h.payload_len) + " not a multiple of 8");
  return h;
}

std::vector<std::uint8_t> serialize(const WireMessage& msg) {
  require(msg.header.payload_len == msg.payload.size(), ErrorKind::kFraming,
          "payload_len does not match payload");
  std::vector<std::uint8_t> frame(kWireHeaderSize + msg.payload.size());
  encode_header(msg.header, std::span<std::uint8_t, kWireHeaderSize>(frame.data(), kWireHeaderSize));
  std::copy(msg.payload.begin(), msg.payload.end(), frame.begin() + kWireHeaderSize);
  return frame;
}

WireMessage deserialize(std::span<const std::uint8_t> frame) {
  require(frame.size() >= kWireHeaderSize, ErrorKind::kFraming, "frame shorter than header");
  WireMessage m;
  m.header = decode_header(frame.first<kWireHeaderSize>());
  require(frame.size() - kWireHeaderSize == m.header.payload_len, ErrorKind::kFraming,
          "frame length does not match payload_len");
  m.payload.assign(frame.begin() + kWireHeaderSize, frame.end());
  return m;
}

// ---------------------------------------------------------------------------

Transport::Transport(PartyId self, std::uint64_t session_id)
    : self_(self), session_id_(session_id) {
  require(self.valid(), ErrorKind::kInvalidArgument, "party id must be 0, 1 or 2");
}

void Transport::send_message(PartyId peer, MsgType type, std::vector<std::uint8_t> payload) {
  require(peer.valid() && peer != self_, ErrorKind::kInvalidArgument, "bad peer id");
  const int p = peer.value();
  WireMessage m;
  m.header.msg_type = type;
  m.header.session_id = session_id_;
  m.header.sequence = send_seq_[p]++;
  m.header.payload_len = static_cast<std::uint32_t>(payload.size());
  m.payload = std::move(payload);
  auto frame = serialize(m);
  stats_.bytes_sent[p] += frame.size();
  stats_.messages[p] += 1;
  send_frame(peer, std::move(frame));
}

WireMessage Transport::recv_message(PartyId peer, MsgType expected) {
  require(peer.valid() && peer != self_, ErrorKind::kInvalidArgument, "bad peer id");
  const int p = peer.value();
  WireMessage m = deserialize(recv_frame(peer));
  require(m.header.version == kWireVersion, ErrorKind::kHandshake,
          "peer speaks wire version " + std::to_string(m.header.version));
  require(m.header.session_id == session_id_, ErrorKind::kHandshake,
          "session id " + std::to_string(m.header.session_id) + " != " +
              std::to_string(session_id_));
  require(m.header.sequence == recv_seq_[p], ErrorKind::kProtocolDesync,
          "expected sequence " + std::to_string(recv_seq_[p]) + " from party " +
              std::to_string(p) + ", got " + std::to_string(m.header.sequence));
  require(m.header.msg_type == expected, ErrorKind::kProtocolDesync,
          "unexpected message type from party " + std::to_string(p));
  ++recv_seq_[p];
  return m;
}

void Transport::send_tensor(PartyId peer, const RingTensor& t) {
  auto m = WireMessage::tensor(session_id_, 0, t.data());
  send_message(peer, MsgType::kTensor, std::move(m.payload));
}

RingTensor Transport::recv_tensor(PartyId peer, const Shape& shape) {
  WireMessage m = recv_message(peer, MsgType::kTensor);
  const std::size_t expected = shape_size(shape);
  require(m.payload.size() == expected * 8, ErrorKind::kFraming,
          "expected " + std::to_string(expected) + " words for shape " + shape_string(shape) +
              ", received " + std::to_string(m.payload.size() / 8));
  return RingTensor(shape, m.words());
}

void Transport::send_control(PartyId peer, std::span<const std::uint8_t> bytes) {
  send_message(peer, MsgType::kControl, std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
}

std::vector<std::uint8_t> Transport::recv_control(PartyId peer) {
  return recv_message(peer, MsgType::kControl).payload;
}

void Transport::barrier_round() { ++stats_.rounds; }

}  // namespace ab3
