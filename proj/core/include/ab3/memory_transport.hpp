#pragma once

#include <array>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>

#include "ab3/transport.hpp"

namespace ab3 {

// Shared mailbox for three in-process parties. Sends never block; a receive
// blocks until a frame arrives. When every party that has not finished is
// blocked on an empty mailbox, no progress is possible and all waiters fail
// with kProtocolDesync.
class InMemoryNetwork {
 public:
  void push(PartyId from, PartyId to, std::vector<std::uint8_t> frame);
  std::vector<std::uint8_t> pop(PartyId from, PartyId to);

  void mark_finished(PartyId p);
  // Frames still queued after all parties finished.
  std::size_t pending() const;

  // Test hook: mutates the next queued frame on the (from, to) channel.
  void tamper(PartyId from, PartyId to,
              const std::function<void(std::vector<std::uint8_t>&)>& edit);

 private:
  bool deadlocked() const;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::array<std::array<std::deque<std::vector<std::uint8_t>>, kNumParties>, kNumParties> queues_;
  std::array<int, kNumParties> waiting_on_{-1, -1, -1};
  std::array<bool, kNumParties> finished_{};
  bool failed_ = false;
};

class MemoryTransport final : public Transport {
 public:
  MemoryTransport(PartyId self, std::uint64_t session_id, std::shared_ptr<InMemoryNetwork> net,
                  double real_latency_ms = 0.0);

  void barrier_round() override;

 protected:
  void send_frame(PartyId peer, std::vector<std::uint8_t> frame) override;
  std::vector<std::uint8_t> recv_frame(PartyId peer) override;

 private:
  std::shared_ptr<InMemoryNetwork> net_;
  double real_latency_ms_;
};

struct SimulationOptions {
  std::uint64_t session_id = 1;
  // Sleeps this long at every barrier; 0 keeps runs fast and the latency is
  // only modeled analytically.
  double real_latency_ms = 0.0;
  // Optional pre-run hook, e.g. to tamper with frames.
  std::function<void(InMemoryNetwork&)> on_start;
};

// Runs three party programs on three threads connected through an
// InMemoryNetwork. Rethrows the first root-cause failure (preferring errors
// other than the induced kProtocolDesync of the parties left waiting), and
// raises kProtocolDesync if frames remain unconsumed at the end.
std::array<CommStats, kNumParties> run_simulation(
    const std::array<std::function<void(Transport&)>, kNumParties>& programs,
    const SimulationOptions& opts = {});

std::array<CommStats, kNumParties> run_simulation(const std::function<void(Transport&)>& program,
                                                  const SimulationOptions& opts = {});

}  // namespace ab3
