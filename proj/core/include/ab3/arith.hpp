#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ab3/party.hpp"
#include "ab3/share.hpp"

namespace ab3 {

// Arithmetic replicated sharing over Z_{2^64}.
//
// Round costs (one round = one barrier):
//   share, reveal, mul/matmul re-sharing, truncate    1 each
//   add, sub, neg, public add/scale by integer         0
// mul/matmul of two scaled operands is followed by one truncation round.
// The *_batch variants run any number of independent operations in the
// round count of one.

/// Input sharing. The owner passes its plaintext; the other parties pass a
/// tensor of the agreed shape (contents ignored). A shape disagreement
/// surfaces as a framing error on the receivers.
ArithShare share(Party& p, PartyId owner, const RingTensor& input);

/// Deterministic sharing of a public value: component 0 carries it.
ArithShare share_public(const Party& p, const RingTensor& value);

RingTensor reveal(Party& p, const ArithShare& x);
/// Only `to` learns the value; the other parties get nullopt.
std::optional<RingTensor> reveal_to(Party& p, const ArithShare& x, PartyId to);
std::vector<RingTensor> reveal_batch(Party& p, std::span<const ArithShare> xs);

ArithShare add(const ArithShare& x, const ArithShare& y);
ArithShare sub(const ArithShare& x, const ArithShare& y);
ArithShare neg(const ArithShare& x);

/// x + c with c public; requires matching scale flags (kScaleMismatch).
ArithShare add_public(const Party& p, const ArithShare& x, const RingTensor& c);
ArithShare sub_public(const Party& p, const ArithShare& x, const RingTensor& c);
/// c - x.
ArithShare public_sub(const Party& p, const RingTensor& c, const ArithShare& x);

/// Local product with public words; no truncation. The result is scaled if
/// either side is. Exact for integer constants.
ArithShare mul_public_raw(const ArithShare& x, const RingTensor& c);
ArithShare mul_public_int(const ArithShare& x, i64 k);

/// x * c for a public real c. A scaled x is multiplied by c at coef_bits()
/// precision and truncated once (1 round); an unscaled integer x yields a
/// scaled result with no communication.
ArithShare mul_public(Party& p, const ArithShare& x, double c);

/// sum_k coeffs[k] * xs[k] + constant, with one truncation when the inputs
/// are scaled. All xs must share a shape and scale flag.
ArithShare linear_combination(Party& p, std::span<const ArithShare> xs,
                              std::span<const double> coeffs, double constant);

ArithShare mul(Party& p, const ArithShare& x, const ArithShare& y);
std::vector<ArithShare> mul_batch(Party& p,
                                  std::span<const std::pair<ArithShare, ArithShare>> pairs);
ArithShare matmul(Party& p, const ArithShare& x, const ArithShare& y);

/// Divides by 2^bits (default: frac_bits) with a truncation pair: open
/// c = x + r + 2^62, then result = (c >> bits) - r' - 2^(62 - bits).
/// Exact to within one ulp (floor semantics) for |x| < 2^62.
ArithShare truncate(Party& p, const ArithShare& x, int bits = -1);
std::vector<ArithShare> truncate_batch(Party& p, std::span<const ArithShare> xs, int bits = -1);

namespace detail {
// Sends z_i to party i-1 and receives z_{i+1} from party i+1 (one round).
std::vector<ArithShare> reshare(Party& p, std::vector<RingTensor> local);
}  // namespace detail

}  // namespace ab3
