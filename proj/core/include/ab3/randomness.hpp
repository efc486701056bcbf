#pragma once

#include <cstdint>

#include "ab3/prf.hpp"
#include "ab3/share.hpp"
#include "ab3/transport.hpp"

namespace ab3 {

// Pairwise keys for party i: k_i (shared with party i-1) and k_{i+1} (shared
// with party i+1), so key j is held by exactly the two parties that hold
// share component j. A third, private key drives the party's own sampling.
//
// Every generator consumes one counter value on every party, so the three
// counters advance in lockstep as long as all parties run the same program.
class CorrelatedRandomness {
 public:
  CorrelatedRandomness(PartyId self, const PrfKey& key_self, const PrfKey& key_next,
                       const PrfKey& key_private);

  // Key setup over the transport: party i derives k_{i+1} from its seed,
  // sends it to party i+1 and receives k_i from party i-1. One control
  // message per direction.
  static CorrelatedRandomness establish(Transport& net, std::uint64_t seed);

  PartyId self() const { return self_; }
  std::uint64_t counter() const { return counter_; }

  // a_i = F(k_i, c) - F(k_{i+1}, c); the three outputs sum to zero.
  RingTensor zero_sharing(const Shape& shape);
  // a_i = F(k_i, c) ^ F(k_{i+1}, c); the three outputs XOR to zero.
  RingTensor zero_sharing_xor(const Shape& shape);

  // (F(k_i, c), F(k_{i+1}, c)): a replicated sharing of a uniform value
  // nobody knows.
  ArithShare shared_random(const Shape& shape);

  // Truncation pair (r, r >> bits) for 0 <= bits < 62, with
  // r = 2^bits * (h_0 + h_1 + h_2) + (l_0 + l_1 + l_2), where component j is
  // drawn from k_j, h_j < 2^(61 - bits) and l_j < floor(2^bits / 3). The low
  // part never carries, so r' = h_0 + h_1 + h_2 exactly and r < 2^63.
  struct TruncPair {
    ArithShare r;
    ArithShare r_shifted;
  };
  TruncPair trunc_pair(const Shape& shape, int bits);

  // Party-private uniform words.
  RingTensor private_random(const Shape& shape);

 private:
  PartyId self_;
  Prf key_self_;
  Prf key_next_;
  Prf key_private_;
  std::uint64_t counter_ = 0;
  std::uint64_t private_counter_ = 0;
};

}  // namespace ab3
