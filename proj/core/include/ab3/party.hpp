#pragma once

#include <array>
#include <deque>
#include <mutex>
#include <string>
#include <string_view>
#include <type_traits>

#include "ab3/memory_transport.hpp"
#include "ab3/randomness.hpp"
#include "ab3/share.hpp"
#include "ab3/transport.hpp"

namespace ab3 {

// Simulator-only checker. Each party records the shares produced by every
// protocol operation; the k-th records of the three parties are compared and
// any break of replication consistency (party i's second component differing
// from party i+1's first) is counted.
class ShareAuditor {
 public:
  void record(PartyId p, std::string_view op, const RingTensor& first, const RingTensor& second);

  std::size_t checks() const;
  std::size_t violations() const;
  std::string first_violation() const;

 private:
  struct Entry {
    std::string op;
    RingTensor first;
    RingTensor second;
  };
  void drain();

  mutable std::mutex mu_;
  std::array<std::deque<Entry>, kNumParties> pending_;
  std::size_t checks_ = 0;
  std::size_t violations_ = 0;
  std::string first_violation_;
};

struct PartyOptions {
  int frac_bits = FixedPointCodec::kDefaultFracBits;
  // Reveal also fetches a duplicate of the missing component from the other
  // holder and fails with kIntegrity on disagreement (doubles reveal bytes).
  bool verify_reveals = false;
  ShareAuditor* auditor = nullptr;
};

// Everything one party needs to run protocols: its transport, correlated
// randomness (set up on construction, one round) and the fixed-point codec.
class Party {
 public:
  Party(Transport& net, std::uint64_t seed, PartyOptions opts = {});

  PartyId id() const { return net_->self(); }
  Transport& net() { return *net_; }
  const Transport& net() const { return *net_; }
  CorrelatedRandomness& rng() { return rng_; }
  const FixedPointCodec& codec() const { return codec_; }
  const PartyOptions& options() const { return opts_; }
  int frac_bits() const { return codec_.frac_bits(); }

  // Fractional bits used to encode public coefficients before a truncation,
  // so constant rounding stays well below one ulp of the data.
  int coef_bits() const;

  void audit(std::string_view op, const ArithShare& s);
  void audit(std::string_view op, const BoolShare& s);

 private:
  Transport* net_;
  PartyOptions opts_;
  FixedPointCodec codec_;
  CorrelatedRandomness rng_;
};

struct PartySimConfig {
  std::array<std::uint64_t, kNumParties> seeds{11, 22, 33};
  PartyOptions party;
  SimulationOptions sim;
};

template <typename R>
struct SimulatedRun {
  std::array<R, kNumParties> outputs;
  std::array<CommStats, kNumParties> stats;
};

// Runs program(Party&) for all three parties in the in-memory simulator and
// collects per-party return values.
template <typename F>
auto simulate_parties(F&& program, const PartySimConfig& cfg = {}) {
  using R = std::invoke_result_t<F&, Party&>;
  if constexpr (std::is_void_v<R>) {
    SimulatedRun<int> run;
    run.stats = run_simulation(
        [&](Transport& t) {
          Party p(t, cfg.seeds[t.self().value()], cfg.party);
          program(p);
        },
        cfg.sim);
    return run;
  } else {
    SimulatedRun<R> run;
    run.stats = run_simulation(
        [&](Transport& t) {
          Party p(t, cfg.seeds[t.self().value()], cfg.party);
          run.outputs[t.self().value()] = program(p);
        },
        cfg.sim);
    return run;
  }
}

}  // namespace ab3
