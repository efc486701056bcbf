#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ab3/party.hpp"
#include "ab3/share.hpp"

namespace ab3 {

/// Public constant as a boolean sharing (component 0 carries it).
BoolShare bool_share_public(const Party& p, const RingTensor& value, int bit_width);

BoolShare bool_xor(const BoolShare& x, const BoolShare& y);
/// Flips every meaningful bit (the low bit when bit_width == 1).
BoolShare bool_not(const Party& p, const BoolShare& x);
BoolShare bool_and(Party& p, const BoolShare& x, const BoolShare& y);
std::vector<BoolShare> bool_and_batch(Party& p,
                                      std::span<const std::pair<BoolShare, BoolShare>> pairs);

RingTensor reveal_bool(Party& p, const BoolShare& x);

/// Arithmetic-to-boolean conversion: the three additive components are
/// reduced to two with a carry-save layer and summed with a Kogge-Stone
/// adder. 8 rounds.
BoolShare a2b(Party& p, const ArithShare& x);

/// Bit k of the two's complement value, as a bit_width = 1 sharing. Same
/// circuit as a2b; the last prefix level skips the propagate update.
BoolShare extract_bit(Party& p, const ArithShare& x, int k);

/// Sign bit. 8 rounds.
BoolShare msb(Party& p, const ArithShare& x);

/// [decode(x) < s] as a single-bit sharing: msb(x - encode(s)). Strict, so
/// x == s yields 0. Needs |decode(x) - s| < 2^(62 - frac_bits).
BoolShare lt_const(Party& p, const ArithShare& x, double s);

/// One comparison per threshold, all in the rounds of a single msb. Result k
/// compares x against thresholds[k].
std::vector<BoolShare> lt_const_batch(Party& p, const ArithShare& x,
                                      std::span<const double> thresholds);

/// Arithmetic sharing of b * y for a single-bit b. The bit's three XOR
/// components are arithmetized, b = u + b_2 - 2 u b_2 with
/// u = b_0 + b_1 - 2 b_0 b_1, and the products are scheduled so that the
/// whole injection takes 2 multiplication rounds:
///   round 1: b_0 b_1, b_2 y        round 2: u y, u (b_2 y)
/// Integer bits keep y's scale, so no truncation is needed.
ArithShare bit_inject(Party& p, const BoolShare& b, const ArithShare& y);

}  // namespace ab3
