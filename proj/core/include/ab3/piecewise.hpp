#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ab3/party.hpp"
#include "ab3/share.hpp"

namespace ab3 {

struct Affine {
  double slope = 0.0;
  double intercept = 0.0;
  double operator()(double x) const { return slope * x + intercept; }
};

// n affine pieces split by n-1 ascending points. Piece i covers
// s_i <= x < s_{i+1} (with s_0 = -inf, s_n = +inf): the comparison is the
// strict x < s, so a point that sits exactly on a boundary goes to the upper
// piece.
class PiecewiseSpec {
 public:
  PiecewiseSpec(std::vector<double> segment_points, std::vector<Affine> pieces);

  const std::vector<double>& segment_points() const { return points_; }
  const std::vector<Affine>& pieces() const { return pieces_; }
  std::size_t num_pieces() const { return pieces_.size(); }

  // Plaintext reference: index of the piece containing x, and its value.
  std::size_t segment_of(double x) const;
  double eval(double x) const;

 private:
  std::vector<double> points_;
  std::vector<Affine> pieces_;
};

enum class SigmoidKind { kThreePiece, kFivePiece };

SigmoidKind parse_sigmoid_kind(std::string_view s);  // "3" | "5" | "three" | "five"
std::string_view to_string(SigmoidKind k);

// 3 pieces: 0 | x + 0.5 | 1, split at -0.5 and 0.5.
// 5 pieces: 1e-4 | 0.02776x + 0.145 | 0.17x + 0.5 | 0.02776x + 0.85498 | 1 - 1e-4,
//           split at -5, -2.5, 2.5, 5.
const PiecewiseSpec& sigmoid_spec(SigmoidKind kind);
double sigmoid_plain(double x, SigmoidKind kind);
double logistic(double x);

struct PiecewiseOptions {
  // Indicator bits as in the textbook form, not(p_i) AND p_{i+1}, which costs
  // one more round than the default p_i XOR p_{i+1}. The two agree whenever
  // the predicates are monotone, which ascending points guarantee.
  bool literal_and = false;
  // When set, receives the comparison bits p_1..p_{n-1} and the indicators
  // b_0..b_{n-1} (for tests that reveal them).
  std::vector<BoolShare>* predicates_out = nullptr;
  std::vector<BoolShare>* indicators_out = nullptr;
};

/// Oblivious evaluation of the piece containing x. All comparisons run as one
/// batch and all bit injections as another, so the round count does not
/// depend on the number of pieces: 8 (comparisons) + 2 (injection) + 1
/// (truncation), plus 1 with literal_and.
ArithShare eval_piecewise(Party& p, const PiecewiseSpec& spec, const ArithShare& x,
                          const PiecewiseOptions& opts = {});

ArithShare sigmoid(Party& p, const ArithShare& x, SigmoidKind kind);

struct SigmoidErrorRow {
  double x = 0.0;
  double approx = 0.0;
  double truth = 0.0;
  double error = 0.0;
};

struct SigmoidErrorReport {
  SigmoidKind kind = SigmoidKind::kFivePiece;
  double max_abs_error = 0.0;
  double mean_abs_error = 0.0;
  double argmax = 0.0;
  std::vector<SigmoidErrorRow> rows;
};

/// Evaluates the secure sigmoid on the grid from, from+step, ..., to inside
/// the 3-party simulator and compares decode(sigmoid(share(x))) against the
/// true logistic function.
SigmoidErrorReport sigmoid_error_report(SigmoidKind kind, double from, double to, double step,
                                        int frac_bits = 16);

std::vector<double> make_grid(double from, double to, double step);

}  // namespace ab3
