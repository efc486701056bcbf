#include "ab3/arith.hpp"

#include <string>

#include "ab3/error.hpp"

namespace ab3 {

namespace {

constexpr int kTruncOffsetBits = 62;

std::vector<Shape> shapes_of(std::span<const RingTensor> ts) {
  std::vector<Shape> s;
  s.reserve(ts.size());
  for (const auto& t : ts) s.push_back(t.shape());
  return s;
}

RingTensor zeros_like(const RingTensor& t) { return RingTensor(t.shape(), t.is_scaled()); }

// Adds a public tensor into component 0 (party 0's first, party 2's second).
void add_to_component0(PartyId id, ArithShare& s, const RingTensor& c) {
  if (id.value() == 0) add_inplace(s.first, c);
  if (id.value() == 2) add_inplace(s.second, c);
}

}  // namespace

ArithShare share(Party& p, PartyId owner, const RingTensor& input) {
  const PartyId me = p.id();
  ArithShare s = p.rng().shared_random(input.shape());
  // The owner replaces component owner+2 (the one it cannot otherwise see
  // being chosen) with v - c_owner - c_{owner+1}.
  const PartyId target = owner.next().next();
  if (me == owner) {
    RingTensor fix = sub(sub(input, s.first), s.second);
    p.net().send_tensor(owner.next(), fix);
    p.net().send_tensor(target, fix);
    p.net().barrier_round();
  } else if (me == owner.next()) {
    s.second = p.net().recv_tensor(owner, input.shape());
    p.net().barrier_round();
  } else {
    s.first = p.net().recv_tensor(owner, input.shape());
    p.net().barrier_round();
  }
  s.set_scaled(input.is_scaled());
  p.audit("share", s);
  return s;
}

ArithShare share_public(const Party& p, const RingTensor& value) {
  ArithShare s{zeros_like(value), zeros_like(value)};
  add_to_component0(p.id(), s, value);
  s.set_scaled(value.is_scaled());
  return s;
}

std::vector<RingTensor> reveal_batch(Party& p, std::span<const ArithShare> xs) {
  const PartyId me = p.id();
  std::vector<RingTensor> firsts, seconds;
  for (const auto& x : xs) {
    firsts.push_back(x.first);
    seconds.push_back(x.second);
  }
  const auto shapes = shapes_of(firsts);
  const RingTensor flat_first = concat(firsts);
  // Party i is missing x_{i+2} = x_{i-1}: the previous party's first.
  p.net().send_tensor(me.next(), flat_first);
  if (p.options().verify_reveals) p.net().send_tensor(me.prev(), concat(seconds));
  const RingTensor missing = p.net().recv_tensor(me.prev(), flat_first.shape());
  if (p.options().verify_reveals) {
    const RingTensor dup = p.net().recv_tensor(me.next(), flat_first.shape());
    require(dup.words() == missing.words(), ErrorKind::kIntegrity,
            "reveal: the two copies of the missing share disagree at party " +
                std::to_string(me.value()));
  }
  p.net().barrier_round();

  const auto parts = split(missing, shapes);
  std::vector<RingTensor> out;
  out.reserve(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    RingTensor v = add(add(xs[k].first, xs[k].second), parts[k]);
    v.set_scaled(xs[k].is_scaled());
    out.push_back(std::move(v));
  }
  return out;
}

RingTensor reveal(Party& p, const ArithShare& x) {
  return std::move(reveal_batch(p, std::span<const ArithShare>(&x, 1)).front());
}

std::optional<RingTensor> reveal_to(Party& p, const ArithShare& x, PartyId to) {
  const PartyId me = p.id();
  std::optional<RingTensor> out;
  if (me == to.prev()) {
    p.net().send_tensor(to, x.first);
  } else if (me == to.next() && p.options().verify_reveals) {
    p.net().send_tensor(to, x.second);
  } else if (me == to) {
    RingTensor missing = p.net().recv_tensor(to.prev(), x.shape());
    if (p.options().verify_reveals) {
      const RingTensor dup = p.net().recv_tensor(to.next(), x.shape());
      require(dup.words() == missing.words(), ErrorKind::kIntegrity,
              "reveal: the two copies of the missing share disagree");
    }
    RingTensor v = add(add(x.first, x.second), missing);
    v.set_scaled(x.is_scaled());
    out = std::move(v);
  }
  p.net().barrier_round();
  return out;
}

ArithShare add(const ArithShare& x, const ArithShare& y) {
  require(x.is_scaled() == y.is_scaled(), ErrorKind::kScaleMismatch, "add of scaled and unscaled");
  return {ab3::add(x.first, y.first), ab3::add(x.second, y.second)};
}

ArithShare sub(const ArithShare& x, const ArithShare& y) {
  require(x.is_scaled() == y.is_scaled(), ErrorKind::kScaleMismatch, "sub of scaled and unscaled");
  return {ab3::sub(x.first, y.first), ab3::sub(x.second, y.second)};
}

ArithShare neg(const ArithShare& x) { return {ab3::neg(x.first), ab3::neg(x.second)}; }

ArithShare add_public(const Party& p, const ArithShare& x, const RingTensor& c) {
  require(x.is_scaled() == c.is_scaled(), ErrorKind::kScaleMismatch,
          "public addend scale does not match share");
  ArithShare out = x;
  if (c.size() != 1)
    require(c.shape() == x.shape(), ErrorKind::kShapeMismatch,
            "add_public: " + shape_string(x.shape()) + " vs " + shape_string(c.shape()));
  add_to_component0(p.id(), out, c);
  return out;
}

ArithShare sub_public(const Party& p, const ArithShare& x, const RingTensor& c) {
  return add_public(p, x, ab3::neg(c));
}

ArithShare public_sub(const Party& p, const RingTensor& c, const ArithShare& x) {
  return add_public(p, neg(x), c);
}

ArithShare mul_public_raw(const ArithShare& x, const RingTensor& c) {
  return {ab3::mul(x.first, c), ab3::mul(x.second, c)};
}

ArithShare mul_public_int(const ArithShare& x, i64 k) {
  const RingTensor c = RingTensor::scalar(ring::from_signed(k));
  ArithShare out = mul_public_raw(x, c);
  out.set_scaled(x.is_scaled());
  return out;
}

ArithShare mul_public(Party& p, const ArithShare& x, double c) {
  return linear_combination(p, std::span<const ArithShare>(&x, 1), std::span<const double>(&c, 1),
                            0.0);
}

ArithShare linear_combination(Party& p, std::span<const ArithShare> xs,
                              std::span<const double> coeffs, double constant) {
  require(!xs.empty() && xs.size() == coeffs.size(), ErrorKind::kInvalidArgument,
          "linear_combination needs one coefficient per share");
  const bool scaled = xs.front().is_scaled();
  const int f = p.frac_bits();
  // Scaled inputs: coefficients at coef_bits, sum at f + coef_bits, then one
  // truncation. Unscaled inputs: coefficients at f, no truncation.
  const int coef = scaled ? p.coef_bits() : f;
  ArithShare acc{RingTensor(xs.front().shape()), RingTensor(xs.front().shape())};
  for (std::size_t k = 0; k < xs.size(); ++k) {
    require(xs[k].is_scaled() == scaled, ErrorKind::kScaleMismatch,
            "linear_combination inputs must share a scale");
    require(xs[k].shape() == acc.shape(), ErrorKind::kShapeMismatch,
            "linear_combination inputs must share a shape");
    const RingTensor ck = RingTensor::scalar(FixedPointCodec::encode_at(coeffs[k], coef));
    add_inplace(acc.first, ab3::mul(xs[k].first, ck));
    add_inplace(acc.second, ab3::mul(xs[k].second, ck));
  }
  const int total = scaled ? f + coef : f;
  add_to_component0(p.id(), acc, RingTensor::scalar(FixedPointCodec::encode_at(constant, total)));
  acc.set_scaled(true);
  if (!scaled) {
    p.audit("linear_combination", acc);
    return acc;
  }
  ArithShare out = truncate(p, acc, coef);
  out.set_scaled(true);
  return out;
}

namespace detail {

std::vector<ArithShare> reshare(Party& p, std::vector<RingTensor> local) {
  const PartyId me = p.id();
  const auto shapes = shapes_of(local);
  RingTensor flat = concat(local);
  add_inplace(flat, p.rng().zero_sharing(flat.shape()));
  p.net().send_tensor(me.prev(), flat);
  const RingTensor from_next = p.net().recv_tensor(me.next(), flat.shape());
  p.net().barrier_round();
  auto mine = split(flat, shapes);
  auto theirs = split(from_next, shapes);
  std::vector<ArithShare> out;
  out.reserve(local.size());
  for (std::size_t k = 0; k < local.size(); ++k) {
    mine[k].set_scaled(local[k].is_scaled());
    theirs[k].set_scaled(local[k].is_scaled());
    out.push_back({std::move(mine[k]), std::move(theirs[k])});
  }
  return out;
}

}  // namespace detail

namespace {

// z_i = x_i y_i + x_i y_{i+1} + x_{i+1} y_i, computed with `op`.
template <typename Op>
RingTensor cross_terms(const ArithShare& x, const ArithShare& y, Op op) {
  RingTensor z = op(x.first, y.first);
  add_inplace(z, op(x.first, y.second));
  add_inplace(z, op(x.second, y.first));
  return z;
}

std::vector<ArithShare> finish_products(Party& p, std::vector<ArithShare> z,
                                        const std::vector<bool>& needs_trunc, const char* op) {
  std::vector<ArithShare> to_trunc;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (needs_trunc[k]) {
      to_trunc.push_back(z[k]);
      idx.push_back(k);
    } else {
      p.audit(op, z[k]);
    }
  }
  if (!to_trunc.empty()) {
    auto t = truncate_batch(p, to_trunc);
    for (std::size_t j = 0; j < idx.size(); ++j) z[idx[j]] = std::move(t[j]);
  }
  return z;
}

}  // namespace

std::vector<ArithShare> mul_batch(Party& p,
                                  std::span<const std::pair<ArithShare, ArithShare>> pairs) {
  std::vector<RingTensor> local;
  std::vector<bool> needs_trunc;
  for (const auto& [x, y] : pairs) {
    RingTensor z = cross_terms(x, y, [](const RingTensor& a, const RingTensor& b) {
      return ab3::mul(a, b);
    });
    z.set_scaled(x.is_scaled() || y.is_scaled());
    local.push_back(std::move(z));
    needs_trunc.push_back(x.is_scaled() && y.is_scaled());
  }
  return finish_products(p, detail::reshare(p, std::move(local)), needs_trunc, "mul");
}

ArithShare mul(Party& p, const ArithShare& x, const ArithShare& y) {
  const std::pair<ArithShare, ArithShare> one{x, y};
  return std::move(mul_batch(p, std::span(&one, 1)).front());
}

ArithShare matmul(Party& p, const ArithShare& x, const ArithShare& y) {
  require(x.first.rank() == 2 && y.first.rank() == 2, ErrorKind::kShapeMismatch,
          "matmul needs 2-D shares");
  require(x.first.cols() == y.first.rows(), ErrorKind::kShapeMismatch,
          "matmul: " + shape_string(x.shape()) + " x " + shape_string(y.shape()));
  RingTensor z = cross_terms(x, y, [](const RingTensor& a, const RingTensor& b) {
    return ab3::matmul(a, b);
  });
  z.set_scaled(x.is_scaled() || y.is_scaled());
  std::vector<RingTensor> local;
  local.push_back(std::move(z));
  return std::move(finish_products(p, detail::reshare(p, std::move(local)),
                                   {x.is_scaled() && y.is_scaled()}, "matmul")
                       .front());
}

std::vector<ArithShare> truncate_batch(Party& p, std::span<const ArithShare> xs, int bits) {
  if (bits < 0) bits = p.frac_bits();
  std::vector<ArithShare> masked;
  std::vector<CorrelatedRandomness::TruncPair> pairs;
  masked.reserve(xs.size());
  pairs.reserve(xs.size());
  const RingTensor offset = RingTensor::scalar(u64{1} << kTruncOffsetBits);
  for (const auto& x : xs) {
    auto pair = p.rng().trunc_pair(x.shape(), bits);
    ArithShare m{ab3::add(x.first, pair.r.first), ab3::add(x.second, pair.r.second)};
    add_to_component0(p.id(), m, offset);
    masked.push_back(std::move(m));
    pairs.push_back(std::move(pair));
  }
  const auto opened = reveal_batch(p, masked);
  const RingTensor unoffset = RingTensor::scalar(u64{1} << (kTruncOffsetBits - bits));
  std::vector<ArithShare> out;
  out.reserve(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    RingTensor c = shift_right_logical(opened[k], static_cast<unsigned>(bits));
    sub_inplace(c, unoffset);
    c.set_scaled(pairs[k].r_shifted.is_scaled());
    ArithShare res = public_sub(p, c, pairs[k].r_shifted);
    res.set_scaled(xs[k].is_scaled());
    p.audit("truncate", res);
    out.push_back(std::move(res));
  }
  return out;
}

ArithShare truncate(Party& p, const ArithShare& x, int bits) {
  return std::move(truncate_batch(p, std::span(&x, 1), bits).front());
}

}  // namespace ab3
