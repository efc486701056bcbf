#include "ab3/ring.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ab3/error.hpp"

namespace ab3 {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kEncodingOverflow: return "encoding overflow";
    case ErrorKind::kShapeMismatch: return "shape mismatch";
    case ErrorKind::kScaleMismatch: return "scale mismatch";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kTimeout: return "timeout";
    case ErrorKind::kHandshake: return "handshake mismatch";
    case ErrorKind::kFraming: return "framing error";
    case ErrorKind::kConnection: return "connection error";
    case ErrorKind::kProtocolDesync: return "protocol desync";
    case ErrorKind::kIntegrity: return "integrity error";
    case ErrorKind::kDegenerateClass: return "degenerate class";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kIo: return "io error";
  }
  return "unknown";
}

FixedPointCodec::FixedPointCodec(int frac_bits)
    : frac_bits_(frac_bits), scale_(std::ldexp(1.0, frac_bits)) {
  require(frac_bits >= kMinFracBits && frac_bits <= kMaxFracBits,
          ErrorKind::kInvalidArgument,
          "frac_bits must be in [8, 24], got " + std::to_string(frac_bits));
}

u64 FixedPointCodec::encode_at(double v, int frac_bits) {
  require(std::isfinite(v), ErrorKind::kEncodingOverflow, "non-finite value");
  const double limit = std::ldexp(1.0, 63 - frac_bits);
  if (std::fabs(v) >= limit) {
    std::ostringstream os;
    os << "|" << v << "| >= 2^" << (63 - frac_bits);
    fail(ErrorKind::kEncodingOverflow, os.str());
  }
  return ring::from_signed(std::llround(std::ldexp(v, frac_bits)));
}

double FixedPointCodec::decode_at(u64 x, int frac_bits) {
  return std::ldexp(static_cast<double>(ring::to_signed(x)), -frac_bits);
}

u64 FixedPointCodec::encode(double v) const { return encode_at(v, frac_bits_); }

double FixedPointCodec::decode(u64 x) const { return decode_at(x, frac_bits_); }

std::vector<u64> FixedPointCodec::encode(std::span<const double> v) const {
  std::vector<u64> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = encode(v[i]);
  return out;
}

std::vector<double> FixedPointCodec::decode(std::span<const u64> x) const {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = decode(x[i]);
  return out;
}

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

RingTensor::RingTensor(Shape shape, bool is_scaled)
    : shape_(std::move(shape)), data_(shape_size(shape_), 0), is_scaled_(is_scaled) {}

RingTensor::RingTensor(Shape shape, std::vector<u64> data, bool is_scaled)
    : shape_(std::move(shape)), data_(std::move(data)), is_scaled_(is_scaled) {
  require(data_.size() == shape_size(shape_), ErrorKind::kShapeMismatch,
          "data length " + std::to_string(data_.size()) + " does not match shape " +
              shape_string(shape_));
}

RingTensor RingTensor::scalar(u64 v, bool is_scaled) {
  return RingTensor(Shape{}, std::vector<u64>{v}, is_scaled);
}

RingTensor RingTensor::vector(std::initializer_list<u64> v, bool is_scaled) {
  return RingTensor(Shape{v.size()}, std::vector<u64>(v), is_scaled);
}

RingTensor RingTensor::matrix(std::size_t rows, std::size_t cols,
                              std::initializer_list<u64> v, bool is_scaled) {
  return RingTensor(Shape{rows, cols}, std::vector<u64>(v), is_scaled);
}

RingTensor RingTensor::encode(const Shape& shape, std::span<const double> values,
                              const FixedPointCodec& codec) {
  return RingTensor(shape, codec.encode(values), true);
}

std::size_t RingTensor::rows() const {
  require(shape_.size() == 2, ErrorKind::kShapeMismatch,
          "expected 2-D tensor, got " + shape_string(shape_));
  return shape_[0];
}

std::size_t RingTensor::cols() const {
  require(shape_.size() == 2, ErrorKind::kShapeMismatch,
          "expected 2-D tensor, got " + shape_string(shape_));
  return shape_[1];
}

std::vector<double> RingTensor::decode(const FixedPointCodec& codec) const {
  return codec.decode(data_);
}

RingTensor RingTensor::reshaped(Shape shape) const {
  return RingTensor(std::move(shape), data_, is_scaled_);
}

RingTensor RingTensor::transposed() const {
  const std::size_t r = rows(), c = cols();
  RingTensor out(Shape{c, r}, is_scaled_);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.data_[j * r + i] = data_[i * c + j];
  return out;
}

RingTensor RingTensor::slice_rows(std::size_t begin, std::size_t end) const {
  const std::size_t c = cols();
  require(begin <= end && end <= rows(), ErrorKind::kShapeMismatch, "row slice out of range");
  std::vector<u64> d(data_.begin() + static_cast<std::ptrdiff_t>(begin * c),
                     data_.begin() + static_cast<std::ptrdiff_t>(end * c));
  return RingTensor(Shape{end - begin, c}, std::move(d), is_scaled_);
}

RingTensor RingTensor::gather_rows(std::span<const std::size_t> idx) const {
  const std::size_t c = cols(), r = rows();
  RingTensor out(Shape{idx.size(), c}, is_scaled_);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    require(idx[k] < r, ErrorKind::kShapeMismatch, "row index out of range");
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(idx[k] * c), c,
                out.data_.begin() + static_cast<std::ptrdiff_t>(k * c));
  }
  return out;
}

namespace {

template <typename Op>
RingTensor elementwise(const RingTensor& a, const RingTensor& b, Op op, const char* name) {
  const bool scaled = a.is_scaled() || b.is_scaled();
  if (a.shape() == b.shape()) {
    RingTensor out(a.shape(), scaled);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = op(a[i], b[i]);
    return out;
  }
  if (b.size() == 1) {
    RingTensor out(a.shape(), scaled);
    const u64 s = b[0];
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = op(a[i], s);
    return out;
  }
  if (a.size() == 1) {
    RingTensor out(b.shape(), scaled);
    const u64 s = a[0];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = op(s, b[i]);
    return out;
  }
  fail(ErrorKind::kShapeMismatch, std::string(name) + ": " + shape_string(a.shape()) +
                                      " vs " + shape_string(b.shape()));
}

}  // namespace

RingTensor add(const RingTensor& a, const RingTensor& b) {
  return elementwise(a, b, ring::add, "add");
}

RingTensor sub(const RingTensor& a, const RingTensor& b) {
  return elementwise(a, b, ring::sub, "sub");
}

RingTensor mul(const RingTensor& a, const RingTensor& b) {
  return elementwise(a, b, ring::mul, "mul");
}

RingTensor neg(const RingTensor& a) {
  RingTensor out(a.shape(), a.is_scaled());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ring::neg(a[i]);
  return out;
}

void add_inplace(RingTensor& a, const RingTensor& b) {
  if (b.size() == 1 && a.shape() != b.shape()) {
    for (auto& w : a.words()) w += b[0];
  } else {
    require(a.shape() == b.shape(), ErrorKind::kShapeMismatch,
            "add: " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  }
  a.set_scaled(a.is_scaled() || b.is_scaled());
}

void sub_inplace(RingTensor& a, const RingTensor& b) {
  if (b.size() == 1 && a.shape() != b.shape()) {
    for (auto& w : a.words()) w -= b[0];
  } else {
    require(a.shape() == b.shape(), ErrorKind::kShapeMismatch,
            "sub: " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  }
  a.set_scaled(a.is_scaled() || b.is_scaled());
}

RingTensor matmul(const RingTensor& a, const RingTensor& b) {
  require(a.rank() == 2 && b.rank() == 2, ErrorKind::kShapeMismatch, "matmul needs 2-D operands");
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  require(b.rows() == k, ErrorKind::kShapeMismatch,
          "matmul: " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  RingTensor out(Shape{n, m}, a.is_scaled() || b.is_scaled());
  const auto ad = a.data();
  const auto bd = b.data();
  auto od = out.data();
  // i-k-j order keeps the inner loop contiguous in both b and out.
  for (std::size_t i = 0; i < n; ++i) {
    u64* orow = od.data() + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const u64 av = ad[i * k + p];
      const u64* brow = bd.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  }
  return out;
}

RingTensor bit_xor(const RingTensor& a, const RingTensor& b) {
  return elementwise(a, b, [](u64 x, u64 y) { return x ^ y; }, "xor");
}

RingTensor bit_and(const RingTensor& a, const RingTensor& b) {
  return elementwise(a, b, [](u64 x, u64 y) { return x & y; }, "and");
}

RingTensor shift_left(const RingTensor& a, unsigned bits) {
  RingTensor out(a.shape(), a.is_scaled());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = bits >= 64 ? 0 : a[i] << bits;
  return out;
}

RingTensor shift_right_logical(const RingTensor& a, unsigned bits) {
  RingTensor out(a.shape(), a.is_scaled());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = bits >= 64 ? 0 : a[i] >> bits;
  return out;
}

RingTensor shift_right_arith(const RingTensor& a, unsigned bits) {
  RingTensor out(a.shape(), a.is_scaled());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ring::shift_right_arith(a[i], bits);
  return out;
}

RingTensor mask(const RingTensor& a, u64 m) {
  RingTensor out(a.shape(), a.is_scaled());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] & m;
  return out;
}

RingTensor concat(std::span<const RingTensor> parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<u64> d;
  d.reserve(total);
  for (const auto& p : parts) d.insert(d.end(), p.words().begin(), p.words().end());
  return RingTensor(Shape{total}, std::move(d));
}

std::vector<RingTensor> split(const RingTensor& flat, std::span<const Shape> shapes) {
  std::vector<RingTensor> out;
  out.reserve(shapes.size());
  std::size_t off = 0;
  for (const auto& s : shapes) {
    const std::size_t n = shape_size(s);
    require(off + n <= flat.size(), ErrorKind::kShapeMismatch, "split past end of tensor");
    std::vector<u64> d(flat.words().begin() + static_cast<std::ptrdiff_t>(off),
                       flat.words().begin() + static_cast<std::ptrdiff_t>(off + n));
    out.emplace_back(s, std::move(d), flat.is_scaled());
    off += n;
  }
  require(off == flat.size(), ErrorKind::kShapeMismatch, "split left trailing words");
  return out;
}

}  // namespace ab3
