#include <gtest/gtest.h>

#include <random>

#include "ab3/error.hpp"
#include "ab3/ring.hpp"
#include "oracles.hpp"

namespace ab3 {
namespace {

constexpr u64 kTwo64Minus(u64 k) { return u64{0} - k; }

TEST(Codec, EncodeExamples) {
  const FixedPointCodec c(16);
  EXPECT_EQ(c.encode(0.5), 32768u);
  EXPECT_EQ(c.encode(-1.0), kTwo64Minus(65536));
  // round(0.17 * 65536) = round(11141.12)
  EXPECT_EQ(c.encode(0.17), 11141u);
}

TEST(Codec, DecodeExamples) {
  const FixedPointCodec c(16);
  EXPECT_EQ(c.decode(32768), 0.5);
  EXPECT_EQ(c.decode(0), 0.0);
  EXPECT_EQ(c.decode(kTwo64Minus(65536)), -1.0);
}

TEST(Codec, OverflowIsRejected) {
  const FixedPointCodec c(16);
  try {
    c.encode(std::ldexp(1.0, 47));
    FAIL() << "expected overflow";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEncodingOverflow);
  }
  EXPECT_THROW(c.encode(-std::ldexp(1.0, 47)), Error);
  EXPECT_THROW(c.encode(std::nan("")), Error);
  EXPECT_NO_THROW(c.encode(std::ldexp(1.0, 46)));
}

TEST(Codec, FracBitsRange) {
  EXPECT_THROW(FixedPointCodec(7), Error);
  EXPECT_THROW(FixedPointCodec(25), Error);
  EXPECT_NO_THROW(FixedPointCodec(8));
  EXPECT_NO_THROW(FixedPointCodec(24));
}

TEST(Codec, RoundTripWithinHalfUlp) {
  std::mt19937_64 gen(1);
  for (int f : {8, 12, 16, 20, 24}) {
    const FixedPointCodec c(f);
    const double bound = std::ldexp(1.0, 62 - f);
    std::uniform_real_distribution<double> dist(-bound / 4, bound / 4);
    std::uniform_real_distribution<double> small(-100.0, 100.0);
    for (int i = 0; i < 2000; ++i) {
      const double v = i % 2 ? dist(gen) : small(gen);
      const double err = std::fabs(c.decode(c.encode(v)) - v);
      EXPECT_LE(err, std::ldexp(1.0, -f - 1) * (1 + 1e-9) + std::fabs(v) * 1e-15) << v;
    }
  }
}

TEST(Codec, SumOfEncodingsDecodesToSum) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  const FixedPointCodec c(16);
  for (int i = 0; i < 1000; ++i) {
    const double a = dist(gen), b = dist(gen);
    EXPECT_NEAR(c.decode(ring::add(c.encode(a), c.encode(b))), a + b, std::ldexp(1.0, -15));
  }
}

TEST(Ring, Wraparound) {
  EXPECT_EQ(ring::add(~u64{0}, 1), 0u);
  EXPECT_EQ(ring::sub(0, 1), ~u64{0});
  EXPECT_EQ(ring::to_signed(u64{1} << 63), std::numeric_limits<i64>::min());
  EXPECT_EQ(ring::shift_right_arith(kTwo64Minus(4), 1), kTwo64Minus(2));
}

TEST(Ring, AlgebraicLawsOnRandomTriples) {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 10000; ++i) {
    const u64 a = gen(), b = gen(), c = gen();
    EXPECT_EQ(ring::add(ring::add(a, b), c), ring::add(a, ring::add(b, c)));
    EXPECT_EQ(ring::add(a, b), ring::add(b, a));
    EXPECT_EQ(ring::mul(ring::mul(a, b), c), ring::mul(a, ring::mul(b, c)));
    EXPECT_EQ(ring::mul(a, b), ring::mul(b, a));
    EXPECT_EQ(ring::mul(a, ring::add(b, c)), ring::add(ring::mul(a, b), ring::mul(a, c)));
  }
}

TEST(Tensor, ElementwiseExamples) {
  EXPECT_EQ(add(RingTensor::vector({1, 2}), RingTensor::vector({3, 4})), RingTensor::vector({4, 6}));
  EXPECT_EQ(add(RingTensor::scalar(~u64{0}), RingTensor::scalar(1)), RingTensor::scalar(0));
  const FixedPointCodec c(16);
  const RingTensor h = RingTensor::scalar(c.encode(0.5), true);
  const RingTensor sq = mul(h, h);
  EXPECT_EQ(FixedPointCodec::decode_at(sq[0], 32), 0.25);
  EXPECT_TRUE(sq.is_scaled());
  EXPECT_EQ(sub(RingTensor::vector({5}), RingTensor::vector({7}))[0], kTwo64Minus(2));
  EXPECT_EQ(neg(RingTensor::vector({1}))[0], ~u64{0});
}

TEST(Tensor, BroadcastAndShapeErrors) {
  const RingTensor v = RingTensor::vector({1, 2, 3});
  EXPECT_EQ(mul(v, RingTensor::scalar(2)), RingTensor::vector({2, 4, 6}));
  try {
    add(v, RingTensor::vector({1, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShapeMismatch);
  }
  EXPECT_THROW(RingTensor(Shape{2, 2}, std::vector<u64>{1, 2, 3}), Error);
}

TEST(Tensor, MatmulExamples) {
  const RingTensor a = RingTensor::matrix(2, 2, {1, 2, 3, 4});
  const RingTensor ones = RingTensor::matrix(2, 1, {1, 1});
  EXPECT_EQ(matmul(a, ones), RingTensor::matrix(2, 1, {3, 7}));
  const RingTensor id = RingTensor::matrix(2, 2, {1, 0, 0, 1});
  EXPECT_EQ(matmul(id, a), a);
  EXPECT_THROW(matmul(a, RingTensor::matrix(3, 1, {1, 1, 1})), Error);
}

TEST(Tensor, MatmulMatchesTripleLoopUpTo8x8) {
  std::mt19937_64 gen(4);
  for (std::size_t m = 1; m <= 8; ++m)
    for (std::size_t k = 1; k <= 8; ++k)
      for (std::size_t n = 1; n <= 8; ++n) {
        RingTensor a(Shape{m, k}), b(Shape{k, n});
        for (auto& w : a.words()) w = gen();
        for (auto& w : b.words()) w = gen();
        const RingTensor got = matmul(a, b);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            u64 s = 0;
            for (std::size_t t = 0; t < k; ++t) s += a.at(i, t) * b.at(t, j);
            ASSERT_EQ(got.at(i, j), s);
          }
      }
}

TEST(Tensor, ReshapeTransposeGatherSlice) {
  const RingTensor a = RingTensor::matrix(2, 3, {1, 2, 3, 4, 5, 6}, true);
  const RingTensor t = a.transposed();
  EXPECT_EQ(t.shape(), (Shape{3, 2}));
  EXPECT_EQ(t.at(2, 1), 6u);
  EXPECT_TRUE(t.is_scaled());
  EXPECT_EQ(a.reshaped({6}).shape(), Shape{6});
  EXPECT_THROW(a.reshaped({4}), Error);
  const std::size_t rows[] = {1, 1, 0};
  EXPECT_EQ(a.gather_rows(rows), RingTensor::matrix(3, 3, {4, 5, 6, 4, 5, 6, 1, 2, 3}));
  EXPECT_EQ(a.slice_rows(1, 2), RingTensor::matrix(1, 3, {4, 5, 6}));
}

TEST(Tensor, ConcatSplitRoundTrip) {
  const RingTensor parts[] = {RingTensor::vector({1, 2}), RingTensor::matrix(1, 3, {3, 4, 5}),
                              RingTensor(Shape{0})};
  const RingTensor flat = concat(parts);
  EXPECT_EQ(flat, RingTensor::vector({1, 2, 3, 4, 5}));
  const Shape shapes[] = {Shape{2}, Shape{1, 3}, Shape{0}};
  const auto back = split(flat, shapes);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0], parts[0]);
  EXPECT_EQ(back[1], parts[1]);
  EXPECT_EQ(back[2].size(), 0u);
  const Shape bad[] = {Shape{4}};
  EXPECT_THROW(split(flat, bad), Error);
}

TEST(Tensor, BitOps) {
  const RingTensor a = RingTensor::vector({0b1100, ~u64{0}});
  const RingTensor b = RingTensor::vector({0b1010, 1});
  EXPECT_EQ(bit_xor(a, b), RingTensor::vector({0b0110, ~u64{0} - 1}));
  EXPECT_EQ(bit_and(a, b), RingTensor::vector({0b1000, 1}));
  EXPECT_EQ(shift_left(b, 1), RingTensor::vector({0b10100, 2}));
  EXPECT_EQ(shift_right_logical(a, 60)[1], 0xFu);
  EXPECT_EQ(shift_right_arith(a, 60)[1], ~u64{0});
  EXPECT_EQ(mask(a, 1), RingTensor::vector({0, 1}));
}

TEST(Tensor, EncodeDecodeTensor) {
  const FixedPointCodec c(16);
  const std::vector<double> v{1.5, -0.25, 3.0};
  const RingTensor t = RingTensor::encode(Shape{3}, v, c);
  EXPECT_TRUE(t.is_scaled());
  EXPECT_EQ(t.decode(c), v);
  EXPECT_DOUBLE_EQ(oracle::decode(t[1], 16), -0.25);
}

}  // namespace
}  // namespace ab3
