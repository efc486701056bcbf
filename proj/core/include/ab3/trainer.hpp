#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ab3/party.hpp"
#include "ab3/piecewise.hpp"
#include "ab3/share.hpp"

namespace ab3 {

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t iterations = 100;
  int frac_bits = FixedPointCodec::kDefaultFracBits;
  SigmoidKind sigmoid = SigmoidKind::kFivePiece;
  double eta0 = 1.0 / 1.2;
  double lambda = 1.0;
  bool l2 = true;  // adds lambda * w / N to the gradient
  bool class_weighting = true;
  std::uint64_t seed = 7;  // public: batch order and initial weights
  double init_scale = 0.01;
  bool literal_and = false;

  // Throws kInvalidArgument for batch_size == 0, batch_size > rows, a
  // frac_bits outside the codec range or non-positive eta0.
  void validate(std::size_t rows) const;

  // Keys mirror the field names; "sigmoid" takes 3 or 5. Missing keys keep
  // their defaults, unknown keys are an error.
  static TrainConfig from_json(const std::string& text);
  static TrainConfig load(const std::string& path);
  std::string to_json() const;
};

/// eta0 / (1 + lambda * eta0 * t); 1 / (1.2 + t) with the defaults.
double learning_rate(std::size_t t, const TrainConfig& cfg);

struct ClassWeights {
  double c0 = 1.0;
  double c1 = 1.0;
  std::size_t n0 = 0;
  std::size_t n1 = 0;

  /// C0 = N / (2 n0), C1 = N / (2 n1). A zero count is kDegenerateClass.
  static ClassWeights from_counts(std::size_t n, std::size_t n1);
};

/// Sums the shared labels locally and reveals the positive count (the only
/// leakage); n0 follows from the public N. Labels may be unscaled {0,1}
/// integers or fixed-point encoded. 1 round.
ClassWeights compute_class_weights(Party& p, const ArithShare& labels);

/// C_y = (C1 - C0) y + C0 as a fixed-point sharing. With unscaled labels this
/// is exact: y = 1 gives encode(C1) and y = 0 gives encode(C0), bit for bit.
/// Scaled labels cost one truncation round.
ArithShare select_weight(Party& p, const ArithShare& y, const ClassWeights& cw);

struct ModelState {
  ArithShare w;  // f x 1, fixed-point
  std::size_t t = 0;
};

/// Public initial weights, uniform in [-init_scale, init_scale].
std::vector<double> initial_weights(std::size_t features, const TrainConfig& cfg);
ModelState init_model(const Party& p, std::size_t features, const TrainConfig& cfg);

/// Seeded Fisher-Yates permutation of 0..n-1 (mt19937_64), independent of the
/// standard library's shuffle so every platform sees the same order.
std::vector<std::size_t> batch_permutation(std::size_t n, std::uint64_t seed);
/// Rows of batch t: positions t*B .. t*B+B-1 of the permutation, cyclically.
std::vector<std::size_t> batch_rows(const std::vector<std::size_t>& perm, std::size_t batch_size,
                                    std::size_t t);

/// One SGD step on a B x f batch with B x 1 labels:
///   out = X w, yhat = sigmoid(out), dy = (yhat - y) * C_y,
///   w <- w (1 - eta_t lambda / N) - (eta_t / B) X^T dy
/// `n_total` is the training set size used by the L2 term.
ModelState train_step(Party& p, const ArithShare& x_batch, const ArithShare& y_batch,
                      const ModelState& state, const TrainConfig& cfg,
                      const std::optional<ClassWeights>& cw, std::size_t n_total);

struct TrainResult {
  ModelState model;
  std::optional<ClassWeights> class_weights;
  CommStats stats;  // communication spent inside train()
};

/// Full loop over a shared N x f matrix and N x 1 labels.
TrainResult train(Party& p, const ArithShare& x, const ArithShare& y, const TrainConfig& cfg);

/// Plaintext decision on revealed weights: approximate sigmoid(x_i . w) >= 0.5.
std::vector<int> predict(const std::vector<double>& w, const std::vector<double>& x_rowmajor,
                         std::size_t cols, SigmoidKind kind);

}  // namespace ab3
