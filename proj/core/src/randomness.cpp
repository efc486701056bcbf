#include "ab3/randomness.hpp"

#include <string>

#include "ab3/error.hpp"

namespace ab3 {

CorrelatedRandomness::CorrelatedRandomness(PartyId self, const PrfKey& key_self,
                                           const PrfKey& key_next, const PrfKey& key_private)
    : self_(self), key_self_(key_self), key_next_(key_next), key_private_(key_private) {}

CorrelatedRandomness CorrelatedRandomness::establish(Transport& net, std::uint64_t seed) {
  const PartyId me = net.self();
  const PrfKey key_next =
      derive_key(seed, net.session_id(), "pair-key/" + std::to_string(me.next().value()));
  const PrfKey key_private = derive_key(seed, net.session_id(), "private");
  net.send_control(me.next(), key_next);
  const auto received = net.recv_control(me.prev());
  require(received.size() == sizeof(PrfKey), ErrorKind::kHandshake, "bad key setup message");
  net.barrier_round();
  PrfKey key_self{};
  std::copy(received.begin(), received.end(), key_self.begin());
  return CorrelatedRandomness(me, key_self, key_next, key_private);
}

RingTensor CorrelatedRandomness::zero_sharing(const Shape& shape) {
  RingTensor a(shape), b(shape);
  const std::uint64_t c = counter_++;
  key_self_.fill(c, a.data());
  key_next_.fill(c, b.data());
  sub_inplace(a, b);
  return a;
}

RingTensor CorrelatedRandomness::zero_sharing_xor(const Shape& shape) {
  RingTensor a(shape), b(shape);
  const std::uint64_t c = counter_++;
  key_self_.fill(c, a.data());
  key_next_.fill(c, b.data());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
  return a;
}

ArithShare CorrelatedRandomness::shared_random(const Shape& shape) {
  ArithShare s{RingTensor(shape), RingTensor(shape)};
  const std::uint64_t c = counter_++;
  key_self_.fill(c, s.first.data());
  key_next_.fill(c, s.second.data());
  return s;
}

CorrelatedRandomness::TruncPair CorrelatedRandomness::trunc_pair(const Shape& shape, int bits) {
  require(bits >= 0 && bits < 62, ErrorKind::kInvalidArgument,
          "truncation bits must be in [0, 62), got " + std::to_string(bits));
  const std::size_t n = shape_size(shape);
  const u64 high_mask = (u64{1} << (61 - bits)) - 1;
  const u64 low_bound = (u64{1} << bits) / 3;
  const std::uint64_t c = counter_++;

  // Each component uses 2n words: n for the high part, n for the low part.
  auto component = [&](const Prf& key, RingTensor& r, RingTensor& r_shifted) {
    std::vector<u64> words(2 * n);
    key.fill(c, words);
    for (std::size_t k = 0; k < n; ++k) {
      const u64 high = words[k] & high_mask;
      const u64 low = low_bound == 0 ? 0 : words[n + k] % low_bound;
      r[k] = (high << bits) + low;
      r_shifted[k] = high;
    }
  };

  TruncPair p{{RingTensor(shape), RingTensor(shape)}, {RingTensor(shape), RingTensor(shape)}};
  component(key_self_, p.r.first, p.r_shifted.first);
  component(key_next_, p.r.second, p.r_shifted.second);
  return p;
}

RingTensor CorrelatedRandomness::private_random(const Shape& shape) {
  RingTensor t(shape);
  key_private_.fill(private_counter_++, t.data());
  return t;
}

}  // namespace ab3
