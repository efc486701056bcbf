#pragma once

#include "ab3/ring.hpp"

namespace ab3 {

// Party i's view of a replicated sharing: (x_i, x_{i+1 mod 3}). For
// arithmetic shares x = x_0 + x_1 + x_2 mod 2^64.
struct ArithShare {
  RingTensor first;
  RingTensor second;

  const Shape& shape() const { return first.shape(); }
  std::size_t size() const { return first.size(); }
  bool is_scaled() const { return first.is_scaled(); }
  void set_scaled(bool s) {
    first.set_scaled(s);
    second.set_scaled(s);
  }

  ArithShare reshaped(const Shape& s) const { return {first.reshaped(s), second.reshaped(s)}; }
  ArithShare transposed() const { return {first.transposed(), second.transposed()}; }
  ArithShare gather_rows(std::span<const std::size_t> rows) const {
    return {first.gather_rows(rows), second.gather_rows(rows)};
  }
};

// Same layout under XOR: x = x_0 ^ x_1 ^ x_2. A bit_width of 1 means only the
// low bit of every word is meaningful (and the rest are zero).
struct BoolShare {
  RingTensor first;
  RingTensor second;
  int bit_width = 64;

  const Shape& shape() const { return first.shape(); }
  std::size_t size() const { return first.size(); }
};

}  // namespace ab3
