#pragma once

#include <array>
#include <condition_variable>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "ab3/transport.hpp"

namespace ab3 {

struct PartyConfig {
  int party_id = 0;
  std::array<std::string, kNumParties> peers;  // "host:port", indexed by party id
  std::uint64_t session_id = 0;
  std::uint64_t seed = 0;
  int connect_timeout_ms = 5000;
  int io_timeout_ms = 120000;

  // { "party_id": 0, "peers": ["h:p","h:p","h:p"], "session_id": 17,
  //   "seed": 42, "connect_timeout_ms": 5000 }
  static PartyConfig from_json(const std::string& text);
  static PartyConfig load(const std::string& path);
  std::string to_json() const;
};

struct HostPort {
  std::string host;
  int port = 0;
  static HostPort parse(const std::string& s);
};

// Mesh of two TCP connections (one per peer). Party i listens on its own
// address and accepts from higher ids; it dials every lower id. Each dialer
// opens with a control frame carrying its party id; both ends validate
// version, session id and identity.
//
// Outgoing frames are written by one writer thread per peer so that a round
// where every party sends before receiving cannot wedge on full socket
// buffers.
class TcpTransport final : public Transport {
 public:
  static std::unique_ptr<TcpTransport> connect(const PartyConfig& config);
  ~TcpTransport() override;

 protected:
  void send_frame(PartyId peer, std::vector<std::uint8_t> frame) override;
  std::vector<std::uint8_t> recv_frame(PartyId peer) override;

 private:
  struct Link;

  TcpTransport(PartyId self, std::uint64_t session_id, int io_timeout_ms);
  void start_writer(int peer, int fd);
  void check_writer(int peer);

  int io_timeout_ms_;
  std::array<std::unique_ptr<Link>, kNumParties> links_;
};

}  // namespace ab3
