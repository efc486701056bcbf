#include <numeric>

#include "ab3/transport.hpp"

namespace ab3 {

std::uint64_t CommStats::total_bytes() const {
  return std::accumulate(bytes_sent.begin(), bytes_sent.end(), std::uint64_t{0});
}

std::uint64_t CommStats::total_messages() const {
  return std::accumulate(messages.begin(), messages.end(), std::uint64_t{0});
}

CommStats CommStats::operator-(const CommStats& earlier) const {
  CommStats d;
  d.rounds = rounds - earlier.rounds;
  for (int i = 0; i < kNumParties; ++i) {
    d.bytes_sent[i] = bytes_sent[i] - earlier.bytes_sent[i];
    d.messages[i] = messages[i] - earlier.messages[i];
  }
  return d;
}

double LatencyModel::modeled_seconds(std::uint64_t rounds, std::uint64_t bytes) const {
  const double bits_per_second = bandwidth_mbps * 1e6;
  return static_cast<double>(rounds) * rtt_ms * 1e-3 +
         static_cast<double>(bytes) * 8.0 / bits_per_second;
}

double LatencyModel::modeled_seconds(const CommStats& s) const {
  return modeled_seconds(s.rounds, s.total_bytes());
}

}  // namespace ab3
