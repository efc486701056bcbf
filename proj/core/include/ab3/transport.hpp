#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ab3/ring.hpp"

namespace ab3 {

inline constexpr int kNumParties = 3;

// Party index with the ring arithmetic used everywhere in the protocols:
// party i holds shares (x_i, x_{i+1 mod 3}).
class PartyId {
 public:
  constexpr PartyId() = default;
  constexpr explicit PartyId(int id) : id_(id) {}

  constexpr int value() const { return id_; }
  constexpr PartyId next() const { return PartyId((id_ + 1) % kNumParties); }
  constexpr PartyId prev() const { return PartyId((id_ + kNumParties - 1) % kNumParties); }
  constexpr bool valid() const { return id_ >= 0 && id_ < kNumParties; }

  friend constexpr bool operator==(PartyId, PartyId) = default;

 private:
  int id_ = 0;
};

// ---------------------------------------------------------------------------
// Wire format. Every frame is a 28-byte little-endian header followed by the
// payload:
//
//   offset size field
//        0    4 magic "AB3\0"
//        4    1 version (1)
//        5    1 msg_type (0 = tensor, 1 = control)
//        6    2 reserved (0)
//        8    8 session_id
//       16    8 sequence
//       24    4 payload_len (bytes)
//       28    * payload
//
// Tensor payloads are little-endian 64-bit ring words.
// ---------------------------------------------------------------------------

inline constexpr std::array<std::uint8_t, 4> kWireMagic{'A', 'B', '3', '\0'};
inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::size_t kWireHeaderSize = 28;

enum class MsgType : std::uint8_t { kTensor = 0, kControl = 1 };

struct WireHeader {
  std::uint8_t version = kWireVersion;
  MsgType msg_type = MsgType::kTensor;
  std::uint16_t reserved = 0;
  std::uint64_t session_id = 0;
  std::uint64_t sequence = 0;
  std::uint32_t payload_len = 0;
};

struct WireMessage {
  WireHeader header;
  std::vector<std::uint8_t> payload;

  static WireMessage tensor(std::uint64_t session_id, std::uint64_t sequence,
                            std::span<const u64> words);
  std::vector<u64> words() const;

  friend bool operator==(const WireMessage& a, const WireMessage& b) {
    return a.header.version == b.header.version && a.header.msg_type == b.header.msg_type &&
           a.header.reserved == b.header.reserved &&
           a.header.session_id == b.header.session_id &&
           a.header.sequence == b.header.sequence &&
           a.header.payload_len == b.header.payload_len && a.payload == b.payload;
  }
};

std::vector<std::uint8_t> serialize(const WireMessage& msg);
void encode_header(const WireHeader& h, std::span<std::uint8_t, kWireHeaderSize> out);
// Validates magic, reserved bits and the tensor word alignment. Version is
// returned as-is so the handshake can report a mismatch distinctly.
WireHeader decode_header(std::span<const std::uint8_t, kWireHeaderSize> in);
WireMessage deserialize(std::span<const std::uint8_t> frame);

// ---------------------------------------------------------------------------
// Communication accounting.
// ---------------------------------------------------------------------------

struct CommStats {
  std::uint64_t rounds = 0;
  std::array<std::uint64_t, kNumParties> bytes_sent{};
  std::array<std::uint64_t, kNumParties> messages{};

  std::uint64_t total_bytes() const;
  std::uint64_t total_messages() const;
  CommStats operator-(const CommStats& earlier) const;
  friend bool operator==(const CommStats&, const CommStats&) = default;
};

struct LatencyModel {
  double rtt_ms = 0.5;
  double bandwidth_mbps = 1000.0;

  static LatencyModel lan() { return {0.5, 1000.0}; }
  static LatencyModel wan() { return {50.0, 100.0}; }

  // rounds * RTT + bytes / bandwidth, in seconds.
  double modeled_seconds(std::uint64_t rounds, std::uint64_t bytes) const;
  double modeled_seconds(const CommStats& s) const;
};

// ---------------------------------------------------------------------------
// Transport: ordered, framed exchange with the two other parties.
// ---------------------------------------------------------------------------

class Transport {
 public:
  Transport(PartyId self, std::uint64_t session_id);
  virtual ~Transport() = default;
  Transport(const Transport&) = delete;
  Transport& operator=(const Transport&) = delete;

  PartyId self() const { return self_; }
  std::uint64_t session_id() const { return session_id_; }

  void send_tensor(PartyId peer, const RingTensor& t);
  // Receives exactly shape_size(shape) words; any other length is a framing
  // error.
  RingTensor recv_tensor(PartyId peer, const Shape& shape);
  void send_control(PartyId peer, std::span<const std::uint8_t> bytes);
  std::vector<std::uint8_t> recv_control(PartyId peer);

  // Ends one communication round: every message queued since the previous
  // barrier belongs to this round.
  virtual void barrier_round();

  const CommStats& stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }

 protected:
  virtual void send_frame(PartyId peer, std::vector<std::uint8_t> frame) = 0;
  virtual std::vector<std::uint8_t> recv_frame(PartyId peer) = 0;

 private:
  void send_message(PartyId peer, MsgType type, std::vector<std::uint8_t> payload);
  WireMessage recv_message(PartyId peer, MsgType expected);

  PartyId self_;
  std::uint64_t session_id_;
  std::array<std::uint64_t, kNumParties> send_seq_{};
  std::array<std::uint64_t, kNumParties> recv_seq_{};
  CommStats stats_;
};

}  // namespace ab3
