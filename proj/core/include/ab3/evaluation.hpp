#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ab3/dataset.hpp"
#include "ab3/session.hpp"
#include "ab3/trainer.hpp"

namespace ab3 {

struct MetricsReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  double balanced_accuracy = 0.0;

  double recall() const;       // TP / (TP + FN)
  double specificity() const;  // TN / (FP + TN)
  std::string to_json() const;
};

/// Counts only; balanced_accuracy is left at 0 when a class is absent.
MetricsReport confusion(const std::vector<int>& preds, const std::vector<int>& labels);

/// (TP/(TP+FN) + TN/(FP+TN)) / 2. kDegenerateClass if either class is absent
/// from the labels; kShapeMismatch on a length mismatch.
MetricsReport balanced_accuracy(const std::vector<int>& preds, const std::vector<int>& labels);

/// k stratified folds of row indices. Rows of each class are shuffled with
/// the seed and dealt round-robin, so every fold's class counts are within
/// one of the overall ratio.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels,
                                                       std::size_t k, std::uint64_t seed);

/// Real-arithmetic trainer with the same batch order, initial weights,
/// schedule, class weights and (by default) the same approximate sigmoid as
/// the secure one.
std::vector<double> plaintext_oracle_train(const Dataset& d, const TrainConfig& cfg,
                                           bool true_sigmoid = false);

struct CvReport {
  std::vector<MetricsReport> folds;
  MetricsReport pooled;  // all held-out predictions together
  // Over the folds whose held-out rows contain both classes. When none do
  // (leave-one-out), the pooled value with std 0.
  double mean = 0.0;
  double stddev = 0.0;
  std::string to_json() const;
  std::string to_table() const;
};

/// Stratified k-fold cross-validation. Each fold trains in the simulator
/// (`plaintext` swaps in the oracle trainer) with seed cfg.seed + fold, then
/// scores the held-out rows in plaintext. A training split holding a single
/// class is kDegenerateClass.
CvReport kfold_cv(const Dataset& d, std::size_t k, const TrainConfig& cfg, bool plaintext = false,
                  const SimulationSetup& setup = {});

}  // namespace ab3
