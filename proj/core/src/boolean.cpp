#include "ab3/boolean.hpp"

#include <cmath>
#include <string>

#include "ab3/arith.hpp"
#include "ab3/error.hpp"

namespace ab3 {

namespace {

u64 width_mask(int bit_width) { return bit_width == 1 ? u64{1} : ~u64{0}; }

BoolShare shifted_left(const BoolShare& x, unsigned k) {
  return {shift_left(x.first, k), shift_left(x.second, k), x.bit_width};
}

BoolShare shifted_right(const BoolShare& x, unsigned k) {
  return {shift_right_logical(x.first, k), shift_right_logical(x.second, k), x.bit_width};
}

// Boolean sharing of additive component j: component j holds x_j, the other
// two are zero. Free, since the two holders of x_j are exactly the parties
// that hold boolean component j.
BoolShare component_as_bool(PartyId me, const ArithShare& x, int j) {
  const int i = me.value();
  BoolShare b{RingTensor(x.shape()), RingTensor(x.shape()), 64};
  if (i == j) b.first = x.first;
  if ((i + 1) % kNumParties == j) b.second = x.second;
  b.first.set_scaled(false);
  b.second.set_scaled(false);
  return b;
}

// Same idea for a boolean component viewed as an integer in {0, 1}.
ArithShare bit_component_as_arith(PartyId me, const BoolShare& b, int j) {
  const int i = me.value();
  ArithShare a{RingTensor(b.shape()), RingTensor(b.shape())};
  if (i == j) a.first = mask(b.first, 1);
  if ((i + 1) % kNumParties == j) a.second = mask(b.second, 1);
  a.set_scaled(false);
  return a;
}

struct PrefixResult {
  BoolShare carries;    // G after the prefix: carry out of each bit position
  BoolShare half_sum;   // a ^ b
};

// Kogge-Stone carry computation for a + b: 1 round for generate/propagate,
// then six prefix levels of one round each.
PrefixResult kogge_stone(Party& p, const BoolShare& a, const BoolShare& b) {
  BoolShare prop = bool_xor(a, b);
  BoolShare gen = bool_and(p, a, b);
  const BoolShare half_sum = prop;
  for (unsigned k = 1; k < 64; k <<= 1) {
    const bool last = (k << 1) >= 64;
    std::vector<std::pair<BoolShare, BoolShare>> work;
    work.emplace_back(prop, shifted_left(gen, k));
    if (!last) work.emplace_back(prop, shifted_left(prop, k));
    auto res = bool_and_batch(p, work);
    gen = bool_xor(gen, res[0]);
    if (!last) prop = std::move(res[1]);
  }
  return {gen, half_sum};
}

// Carry-save reduction of the three additive components to (s, carry << 1).
std::pair<BoolShare, BoolShare> carry_save(Party& p, const ArithShare& x) {
  const PartyId me = p.id();
  const BoolShare a = component_as_bool(me, x, 0);
  const BoolShare b = component_as_bool(me, x, 1);
  const BoolShare c = component_as_bool(me, x, 2);
  const BoolShare ac = bool_xor(a, c);
  const BoolShare sum = bool_xor(ac, b);
  // maj(a, b, c) = ((a ^ c) & (b ^ c)) ^ c
  const BoolShare maj = bool_xor(bool_and(p, ac, bool_xor(b, c)), c);
  return {sum, shifted_left(maj, 1)};
}

}  // namespace

BoolShare bool_share_public(const Party& p, const RingTensor& value, int bit_width) {
  BoolShare s{RingTensor(value.shape()), RingTensor(value.shape()), bit_width};
  const RingTensor v = mask(value, width_mask(bit_width));
  if (p.id().value() == 0) s.first = v;
  if (p.id().value() == 2) s.second = v;
  s.first.set_scaled(false);
  s.second.set_scaled(false);
  return s;
}

BoolShare bool_xor(const BoolShare& x, const BoolShare& y) {
  require(x.bit_width == y.bit_width, ErrorKind::kInvalidArgument, "xor of mismatched bit widths");
  return {bit_xor(x.first, y.first), bit_xor(x.second, y.second), x.bit_width};
}

BoolShare bool_not(const Party& p, const BoolShare& x) {
  const RingTensor ones = RingTensor::scalar(width_mask(x.bit_width));
  BoolShare out = x;
  if (p.id().value() == 0) out.first = bit_xor(out.first, ones);
  if (p.id().value() == 2) out.second = bit_xor(out.second, ones);
  return out;
}

std::vector<BoolShare> bool_and_batch(Party& p,
                                      std::span<const std::pair<BoolShare, BoolShare>> pairs) {
  const PartyId me = p.id();
  std::vector<RingTensor> local;
  std::vector<Shape> shapes;
  for (const auto& [x, y] : pairs) {
    require(x.bit_width == y.bit_width, ErrorKind::kInvalidArgument,
            "and of mismatched bit widths");
    RingTensor z = bit_and(x.first, y.first);
    z = bit_xor(z, bit_and(x.first, y.second));
    z = bit_xor(z, bit_and(x.second, y.first));
    shapes.push_back(z.shape());
    local.push_back(std::move(z));
  }
  RingTensor flat = concat(local);
  flat = bit_xor(flat, p.rng().zero_sharing_xor(flat.shape()));
  p.net().send_tensor(me.prev(), flat);
  const RingTensor from_next = p.net().recv_tensor(me.next(), flat.shape());
  p.net().barrier_round();
  auto mine = split(flat, shapes);
  auto theirs = split(from_next, shapes);
  std::vector<BoolShare> out;
  out.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const int w = pairs[k].first.bit_width;
    BoolShare s{mask(mine[k], width_mask(w)), mask(theirs[k], width_mask(w)), w};
    p.audit("and", s);
    out.push_back(std::move(s));
  }
  return out;
}

BoolShare bool_and(Party& p, const BoolShare& x, const BoolShare& y) {
  const std::pair<BoolShare, BoolShare> one{x, y};
  return std::move(bool_and_batch(p, std::span(&one, 1)).front());
}

RingTensor reveal_bool(Party& p, const BoolShare& x) {
  const PartyId me = p.id();
  p.net().send_tensor(me.next(), x.first);
  const RingTensor missing = p.net().recv_tensor(me.prev(), x.shape());
  p.net().barrier_round();
  return bit_xor(bit_xor(x.first, x.second), missing);
}

BoolShare a2b(Party& p, const ArithShare& x) {
  const auto [s, c] = carry_save(p, x);
  const auto pre = kogge_stone(p, s, c);
  BoolShare out = bool_xor(pre.half_sum, shifted_left(pre.carries, 1));
  p.audit("a2b", out);
  return out;
}

BoolShare extract_bit(Party& p, const ArithShare& x, int k) {
  require(k >= 0 && k < 64, ErrorKind::kInvalidArgument, "bit index out of range");
  const auto [s, c] = carry_save(p, x);
  const auto pre = kogge_stone(p, s, c);
  BoolShare sum = bool_xor(pre.half_sum, shifted_left(pre.carries, 1));
  BoolShare bit = shifted_right(sum, static_cast<unsigned>(k));
  bit.first = mask(bit.first, 1);
  bit.second = mask(bit.second, 1);
  bit.bit_width = 1;
  p.audit("extract_bit", bit);
  return bit;
}

BoolShare msb(Party& p, const ArithShare& x) { return extract_bit(p, x, 63); }

std::vector<BoolShare> lt_const_batch(Party& p, const ArithShare& x,
                                      std::span<const double> thresholds) {
  std::vector<RingTensor> firsts, seconds;
  for (double s : thresholds) {
    const RingTensor c = x.is_scaled() ? RingTensor::scalar(p.codec().encode(s), true)
                                       : RingTensor::scalar(ring::from_signed(
                                             static_cast<i64>(std::llround(s))));
    ArithShare d = sub_public(p, x, c);
    firsts.push_back(std::move(d.first));
    seconds.push_back(std::move(d.second));
  }
  if (thresholds.empty()) return {};
  const ArithShare stacked{concat(firsts), concat(seconds)};
  const BoolShare bits = msb(p, stacked);
  std::vector<Shape> shapes(thresholds.size(), x.shape());
  auto f = split(bits.first, shapes);
  auto s = split(bits.second, shapes);
  std::vector<BoolShare> out;
  for (std::size_t k = 0; k < thresholds.size(); ++k)
    out.push_back({std::move(f[k]), std::move(s[k]), 1});
  return out;
}

BoolShare lt_const(Party& p, const ArithShare& x, double s) {
  return std::move(lt_const_batch(p, x, std::span(&s, 1)).front());
}

ArithShare bit_inject(Party& p, const BoolShare& b, const ArithShare& y) {
  require(b.bit_width == 1, ErrorKind::kInvalidArgument, "bit_inject needs a single-bit share");
  require(b.shape() == y.shape(), ErrorKind::kShapeMismatch,
          "bit_inject: " + shape_string(b.shape()) + " vs " + shape_string(y.shape()));
  const PartyId me = p.id();
  const ArithShare b0 = bit_component_as_arith(me, b, 0);
  const ArithShare b1 = bit_component_as_arith(me, b, 1);
  const ArithShare b2 = bit_component_as_arith(me, b, 2);

  const std::pair<ArithShare, ArithShare> first_round[] = {{b0, b1}, {b2, y}};
  auto r1 = mul_batch(p, first_round);
  const ArithShare u = sub(add(b0, b1), mul_public_int(r1[0], 2));
  const ArithShare& b2y = r1[1];

  const std::pair<ArithShare, ArithShare> second_round[] = {{u, y}, {u, b2y}};
  auto r2 = mul_batch(p, second_round);
  ArithShare out = sub(add(r2[0], b2y), mul_public_int(r2[1], 2));
  p.audit("bit_inject", out);
  return out;
}

}  // namespace ab3
