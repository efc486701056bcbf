#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ab3 {

using u64 = std::uint64_t;
using i64 = std::int64_t;

// Elements of Z_{2^64}. Unsigned arithmetic wraps, which is exactly the ring.
namespace ring {

inline u64 add(u64 a, u64 b) { return a + b; }
inline u64 sub(u64 a, u64 b) { return a - b; }
inline u64 mul(u64 a, u64 b) { return a * b; }
inline u64 neg(u64 a) { return u64{0} - a; }
inline i64 to_signed(u64 a) { return static_cast<i64>(a); }
inline u64 from_signed(i64 a) { return static_cast<u64>(a); }
// Arithmetic (sign-preserving) shift of the two's complement reading.
inline u64 shift_right_arith(u64 a, unsigned bits) {
  return static_cast<u64>(static_cast<i64>(a) >> bits);
}

}  // namespace ring

class FixedPointCodec {
 public:
  static constexpr int kTotalBits = 64;
  static constexpr int kDefaultFracBits = 16;
  static constexpr int kMinFracBits = 8;
  static constexpr int kMaxFracBits = 24;

  explicit FixedPointCodec(int frac_bits = kDefaultFracBits);

  int frac_bits() const { return frac_bits_; }
  double scale() const { return scale_; }

  /// round(v * 2^frac_bits) mod 2^64. Throws kEncodingOverflow when
  /// |v| >= 2^(63 - frac_bits).
  u64 encode(double v) const;
  /// Same as encode() but at an explicit number of fractional bits, used for
  /// double-scaled constants and high-precision public coefficients.
  static u64 encode_at(double v, int frac_bits);
  double decode(u64 x) const;
  static double decode_at(u64 x, int frac_bits);

  std::vector<u64> encode(std::span<const double> v) const;
  std::vector<double> decode(std::span<const u64> x) const;

  friend bool operator==(const FixedPointCodec&, const FixedPointCodec&) = default;

 private:
  int frac_bits_;
  double scale_;
};

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

// Dense row-major tensor over the ring. A tensor with an empty shape is a
// scalar holding one word.
class RingTensor {
 public:
  RingTensor() : shape_{}, data_(1, 0) {}
  explicit RingTensor(Shape shape, bool is_scaled = false);
  RingTensor(Shape shape, std::vector<u64> data, bool is_scaled = false);

  static RingTensor scalar(u64 v, bool is_scaled = false);
  static RingTensor vector(std::initializer_list<u64> v, bool is_scaled = false);
  static RingTensor matrix(std::size_t rows, std::size_t cols,
                           std::initializer_list<u64> v, bool is_scaled = false);
  static RingTensor encode(const Shape& shape, std::span<const double> values,
                           const FixedPointCodec& codec);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::size_t rank() const { return shape_.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  bool is_scaled() const { return is_scaled_; }
  void set_scaled(bool s) { is_scaled_ = s; }

  std::span<u64> data() { return data_; }
  std::span<const u64> data() const { return data_; }
  std::vector<u64>& words() { return data_; }
  const std::vector<u64>& words() const { return data_; }

  u64& operator[](std::size_t i) { return data_[i]; }
  u64 operator[](std::size_t i) const { return data_[i]; }
  u64& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  u64 at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  std::vector<double> decode(const FixedPointCodec& codec) const;

  RingTensor reshaped(Shape shape) const;
  RingTensor transposed() const;
  // Rows [begin, end) of a 2-D tensor.
  RingTensor slice_rows(std::size_t begin, std::size_t end) const;
  RingTensor gather_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const RingTensor& a, const RingTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<u64> data_;
  bool is_scaled_ = false;
};

// Elementwise ops accept equal shapes, or a single-word operand broadcast over
// the other. The result is scaled if either input is; mul of two scaled
// tensors is doubly scaled and must be truncated by the caller.
RingTensor add(const RingTensor& a, const RingTensor& b);
RingTensor sub(const RingTensor& a, const RingTensor& b);
RingTensor mul(const RingTensor& a, const RingTensor& b);
RingTensor neg(const RingTensor& a);
RingTensor matmul(const RingTensor& a, const RingTensor& b);

void add_inplace(RingTensor& a, const RingTensor& b);
void sub_inplace(RingTensor& a, const RingTensor& b);

// Bitwise helpers for boolean sharing.
RingTensor bit_xor(const RingTensor& a, const RingTensor& b);
RingTensor bit_and(const RingTensor& a, const RingTensor& b);
RingTensor shift_left(const RingTensor& a, unsigned bits);
RingTensor shift_right_logical(const RingTensor& a, unsigned bits);
RingTensor shift_right_arith(const RingTensor& a, unsigned bits);
RingTensor mask(const RingTensor& a, u64 m);

RingTensor concat(std::span<const RingTensor> parts);
std::vector<RingTensor> split(const RingTensor& flat, std::span<const Shape> shapes);

}  // namespace ab3
