#include "ab3/memory_transport.hpp"

#include <chrono>
#include <exception>
#include <thread>

#include "ab3/error.hpp"

namespace ab3 {

void InMemoryNetwork::push(PartyId from, PartyId to, std::vector<std::uint8_t> frame) {
  {
    std::lock_guard lk(mu_);
    queues_[from.value()][to.value()].push_back(std::move(frame));
  }
  cv_.notify_all();
}

bool InMemoryNetwork::deadlocked() const {
  for (int p = 0; p < kNumParties; ++p) {
    if (finished_[p]) continue;
    const int src = waiting_on_[p];
    if (src < 0) return false;
    if (!queues_[src][p].empty()) return false;
  }
  return true;
}

std::vector<std::uint8_t> InMemoryNetwork::pop(PartyId from, PartyId to) {
  std::unique_lock lk(mu_);
  auto& q = queues_[from.value()][to.value()];
  waiting_on_[to.value()] = from.value();
  if (q.empty() && deadlocked()) {
    failed_ = true;
    cv_.notify_all();
  }
  cv_.wait(lk, [&] { return !q.empty() || failed_; });
  waiting_on_[to.value()] = -1;
  if (q.empty()) {
    fail(ErrorKind::kProtocolDesync, "party " + std::to_string(to.value()) +
                                         " blocked on party " + std::to_string(from.value()) +
                                         " with no runnable party left");
  }
  auto frame = std::move(q.front());
  q.pop_front();
  return frame;
}

void InMemoryNetwork::mark_finished(PartyId p) {
  {
    std::lock_guard lk(mu_);
    finished_[p.value()] = true;
    if (deadlocked()) failed_ = true;
  }
  cv_.notify_all();
}

std::size_t InMemoryNetwork::pending() const {
  std::lock_guard lk(mu_);
  std::size_t n = 0;
  for (const auto& row : queues_)
    for (const auto& q : row) n += q.size();
  return n;
}

void InMemoryNetwork::tamper(PartyId from, PartyId to,
                             const std::function<void(std::vector<std::uint8_t>&)>& edit) {
  std::lock_guard lk(mu_);
  auto& q = queues_[from.value()][to.value()];
  require(!q.empty(), ErrorKind::kInvalidArgument, "no queued frame to tamper with");
  edit(q.front());
}

MemoryTransport::MemoryTransport(PartyId self, std::uint64_t session_id,
                                 std::shared_ptr<InMemoryNetwork> net, double real_latency_ms)
    : Transport(self, session_id), net_(std::move(net)), real_latency_ms_(real_latency_ms) {}

void MemoryTransport::send_frame(PartyId peer, std::vector<std::uint8_t> frame) {
  net_->push(self(), peer, std::move(frame));
}

std::vector<std::uint8_t> MemoryTransport::recv_frame(PartyId peer) {
  return net_->pop(peer, self());
}

void MemoryTransport::barrier_round() {
  Transport::barrier_round();
  if (real_latency_ms_ > 0)
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(real_latency_ms_));
}

std::array<CommStats, kNumParties> run_simulation(
    const std::array<std::function<void(Transport&)>, kNumParties>& programs,
    const SimulationOptions& opts) {
  auto net = std::make_shared<InMemoryNetwork>();
  std::array<std::unique_ptr<MemoryTransport>, kNumParties> transports;
  for (int p = 0; p < kNumParties; ++p)
    transports[p] =
        std::make_unique<MemoryTransport>(PartyId(p), opts.session_id, net, opts.real_latency_ms);
  if (opts.on_start) opts.on_start(*net);

  std::array<std::exception_ptr, kNumParties> errors;
  auto body = [&](int p) {
    try {
      programs[p](*transports[p]);
    } catch (...) {
      errors[p] = std::current_exception();
    }
    net->mark_finished(PartyId(p));
  };
  {
    std::array<std::jthread, kNumParties> threads;
    for (int p = 0; p < kNumParties; ++p) threads[p] = std::jthread(body, p);
  }

  std::exception_ptr first_desync;
  for (const auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::kProtocolDesync) throw;
      if (!first_desync) first_desync = e;
    }
  }
  if (first_desync) std::rethrow_exception(first_desync);
  require(net->pending() == 0, ErrorKind::kProtocolDesync,
          std::to_string(net->pending()) + " frame(s) never consumed");

  std::array<CommStats, kNumParties> stats;
  for (int p = 0; p < kNumParties; ++p) stats[p] = transports[p]->stats();
  return stats;
}

std::array<CommStats, kNumParties> run_simulation(const std::function<void(Transport&)>& program,
                                                  const SimulationOptions& opts) {
  return run_simulation({program, program, program}, opts);
}

}  // namespace ab3
