#pragma once

// Plaintext reference values written independently of the library code, for
// tests to compare against.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// ABY3's 3-piece sigmoid.
inline double sigmoid3(double x) {
  if (x < -0.5) return 0.0;
  if (x < 0.5) return x + 0.5;
  return 1.0;
}

// The 5-piece table. Points exactly on a boundary take the upper piece, the
// same convention as the 3-piece table and the [x < s] predicate.
inline double sigmoid5(double x) {
  if (x < -5.0) return 1e-4;
  if (x < -2.5) return 0.02776 * x + 0.145;
  if (x < 2.5) return 0.17 * x + 0.5;
  if (x < 5.0) return 0.02776 * x + 0.85498;
  return 1.0 - 1e-4;
}

inline double sigmoid(double x, int pieces) { return pieces == 3 ? sigmoid3(x) : sigmoid5(x); }

// Maximum |approx - logistic| over from, from+step, ..., to.
inline double max_sigmoid_error(int pieces, double from, double to, double step) {
  double worst = 0.0;
  const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    const double x = from + static_cast<double>(i) * step;
    worst = std::fmax(worst, std::fabs(sigmoid(x, pieces) - logistic(x)));
  }
  return worst;
}

inline double learning_rate(std::size_t t) { return 1.0 / (1.2 + static_cast<double>(t)); }

struct Weights {
  double c0, c1;
};
inline Weights class_weights(std::size_t n, std::size_t n1) {
  const double nn = static_cast<double>(n);
  return {nn / (2.0 * static_cast<double>(n - n1)), nn / (2.0 * static_cast<double>(n1))};
}

// Two's complement value of a ring word at f fractional bits.
inline double decode(std::uint64_t w, int f) {
  return std::ldexp(static_cast<double>(static_cast<std::int64_t>(w)), -f);
}

inline double balanced_accuracy(const std::vector<int>& pred, const std::vector<int>& y) {
  double tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i]) (pred[i] ? tp : fn) += 1;
    else (pred[i] ? fp : tn) += 1;
  }
  return (tp / (tp + fn) + tn / (tn + fp)) / 2.0;
}

}  // namespace oracle
