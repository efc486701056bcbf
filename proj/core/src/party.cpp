#include "ab3/party.hpp"

#include <algorithm>

namespace ab3 {

void ShareAuditor::record(PartyId p, std::string_view op, const RingTensor& first,
                          const RingTensor& second) {
  std::lock_guard lk(mu_);
  pending_[p.value()].push_back(Entry{std::string(op), first, second});
  drain();
}

void ShareAuditor::drain() {
  while (std::all_of(pending_.begin(), pending_.end(), [](const auto& q) { return !q.empty(); })) {
    std::array<Entry, kNumParties> e;
    for (int i = 0; i < kNumParties; ++i) {
      e[i] = std::move(pending_[i].front());
      pending_[i].pop_front();
    }
    ++checks_;
    for (int i = 0; i < kNumParties; ++i) {
      const int j = (i + 1) % kNumParties;
      const bool same_op = e[i].op == e[j].op;
      if (!same_op || e[i].second.words() != e[j].first.words()) {
        if (violations_ == 0)
          first_violation_ = same_op ? "replication broken after '" + e[i].op + "' between parties " +
                                           std::to_string(i) + " and " + std::to_string(j)
                                     : "parties ran different ops: '" + e[i].op + "' vs '" +
                                           e[j].op + "'";
        ++violations_;
        break;
      }
    }
  }
}

std::size_t ShareAuditor::checks() const {
  std::lock_guard lk(mu_);
  return checks_;
}

std::size_t ShareAuditor::violations() const {
  std::lock_guard lk(mu_);
  return violations_;
}

std::string ShareAuditor::first_violation() const {
  std::lock_guard lk(mu_);
  return first_violation_;
}

Party::Party(Transport& net, std::uint64_t seed, PartyOptions opts)
    : net_(&net),
      opts_(opts),
      codec_(opts.frac_bits),
      rng_(CorrelatedRandomness::establish(net, seed)) {}

int Party::coef_bits() const {
  const int f = codec_.frac_bits();
  return std::min(f + 8, 48 - f);
}

void Party::audit(std::string_view op, const ArithShare& s) {
  if (opts_.auditor) opts_.auditor->record(id(), op, s.first, s.second);
}

void Party::audit(std::string_view op, const BoolShare& s) {
  if (opts_.auditor) opts_.auditor->record(id(), op, s.first, s.second);
}

}  // namespace ab3
