#include "ab3/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ab3/error.hpp"

namespace ab3 {

using nlohmann::json;

double MetricsReport::recall() const {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double MetricsReport::specificity() const {
  return tn + fp == 0 ? 0.0 : static_cast<double>(tn) / static_cast<double>(tn + fp);
}

std::string MetricsReport::to_json() const {
  return json{{"tp", tp}, {"fp", fp}, {"tn", tn}, {"fn", fn},
              {"balanced_accuracy", balanced_accuracy}}
      .dump();
}

MetricsReport confusion(const std::vector<int>& preds, const std::vector<int>& labels) {
  require(preds.size() == labels.size(), ErrorKind::kShapeMismatch,
          "balanced_accuracy: " + std::to_string(preds.size()) + " predictions for " +
              std::to_string(labels.size()) + " labels");
  MetricsReport m;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] != 0;
    if (labels[i] != 0) (p ? m.tp : m.fn)++;
    else (p ? m.fp : m.tn)++;
  }
  if (m.tp + m.fn > 0 && m.tn + m.fp > 0) m.balanced_accuracy = (m.recall() + m.specificity()) / 2.0;
  return m;
}

MetricsReport balanced_accuracy(const std::vector<int>& preds, const std::vector<int>& labels) {
  MetricsReport m = confusion(preds, labels);
  require(m.tp + m.fn > 0 && m.tn + m.fp > 0, ErrorKind::kDegenerateClass,
          "balanced accuracy undefined: a class is absent from the labels");
  return m;
}

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels,
                                                       std::size_t k, std::uint64_t seed) {
  require(k >= 2 && k <= labels.size(), ErrorKind::kInvalidArgument,
          "k must lie in [2, N]");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] != 0 ? pos : neg).push_back(i);
  std::mt19937_64 gen(seed);
  for (auto* v : {&pos, &neg})
    for (std::size_t i = v->size(); i > 1; --i) std::swap((*v)[i - 1], (*v)[gen() % i]);

  std::vector<std::vector<std::size_t>> folds(k);
  // Negatives continue the deal where positives stopped, which keeps the
  // fold sizes within one of each other.
  std::size_t next = 0;
  for (std::size_t i : pos) folds[next++ % k].push_back(i);
  for (std::size_t i : neg) folds[next++ % k].push_back(i);
  return folds;
}

std::vector<double> plaintext_oracle_train(const Dataset& d, const TrainConfig& cfg,
                                           bool true_sigmoid) {
  cfg.validate(d.rows);
  const std::size_t n = d.rows;
  const std::size_t f = d.cols;
  std::optional<ClassWeights> cw;
  if (cfg.class_weighting) cw = ClassWeights::from_counts(n, d.positives());
  std::vector<double> w = initial_weights(f, cfg);
  const auto perm = batch_permutation(n, cfg.seed);
  const double b = static_cast<double>(cfg.batch_size);

  std::vector<double> g(f);
  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    const auto rows = batch_rows(perm, cfg.batch_size, t);
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t r : rows) {
      double z = 0.0;
      for (std::size_t j = 0; j < f; ++j) z += d.at(r, j) * w[j];
      const double yhat = true_sigmoid ? logistic(z) : sigmoid_plain(z, cfg.sigmoid);
      double dy = yhat - d.y[r];
      if (cw) dy *= d.y[r] != 0 ? cw->c1 : cw->c0;
      for (std::size_t j = 0; j < f; ++j) g[j] += d.at(r, j) * dy;
    }
    const double eta = learning_rate(t, cfg);
    const double decay = cfg.l2 ? 1.0 - eta * cfg.lambda / static_cast<double>(n) : 1.0;
    for (std::size_t j = 0; j < f; ++j) w[j] = w[j] * decay - eta / b * g[j];
  }
  return w;
}

std::string CvReport::to_json() const {
  json folds_j = json::array();
  for (const auto& m : folds) folds_j.push_back(json::parse(m.to_json()));
  return json{{"folds", folds_j},
              {"pooled", json::parse(pooled.to_json())},
              {"mean_balanced_accuracy", mean},
              {"std_balanced_accuracy", stddev}}
      .dump(2);
}

std::string CvReport::to_table() const {
  std::ostringstream out;
  char line[128];
  out << "fold     TP    FP    TN    FN  balanced_acc\n";
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const auto& m = folds[i];
    std::snprintf(line, sizeof line, "%4zu %6zu %5zu %5zu %5zu  %.4f\n", i, m.tp, m.fp, m.tn, m.fn,
                  m.balanced_accuracy);
    out << line;
  }
  std::snprintf(line, sizeof line, "mean %.4f  std %.4f\n", mean, stddev);
  out << line;
  return out.str();
}

CvReport kfold_cv(const Dataset& d, std::size_t k, const TrainConfig& cfg, bool plaintext,
                  const SimulationSetup& setup) {
  const auto folds = stratified_folds(d.y, k, cfg.seed);
  CvReport rep;
  std::vector<int> all_preds, all_labels;
  std::vector<double> scores;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::size_t> train_rows;
    for (std::size_t j = 0; j < k; ++j)
      if (j != i) train_rows.insert(train_rows.end(), folds[j].begin(), folds[j].end());
    const Dataset train_set = d.subset(train_rows);
    const Dataset test_set = d.subset(folds[i]);
    const std::size_t pos = train_set.positives();
    require(pos > 0 && pos < train_set.rows, ErrorKind::kDegenerateClass,
            "training split of fold " + std::to_string(i) + " holds a single class");

    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = cfg.seed + i;
    fold_cfg.batch_size = std::min(cfg.batch_size, train_set.rows);
    const std::vector<double> w = plaintext ? plaintext_oracle_train(train_set, fold_cfg)
                                            : simulate_training(train_set, fold_cfg, setup).weights;
    const auto preds = predict(w, test_set.x, test_set.cols, cfg.sigmoid);
    const MetricsReport m = confusion(preds, test_set.y);
    if (m.tp + m.fn > 0 && m.tn + m.fp > 0) scores.push_back(m.balanced_accuracy);
    rep.folds.push_back(m);
    all_preds.insert(all_preds.end(), preds.begin(), preds.end());
    all_labels.insert(all_labels.end(), test_set.y.begin(), test_set.y.end());
  }
  rep.pooled = balanced_accuracy(all_preds, all_labels);
  if (scores.empty()) {
    rep.mean = rep.pooled.balanced_accuracy;
    return rep;
  }
  double sum = 0.0;
  for (double s : scores) sum += s;
  rep.mean = sum / static_cast<double>(scores.size());
  double var = 0.0;
  for (double s : scores) var += (s - rep.mean) * (s - rep.mean);
  rep.stddev = std::sqrt(var / static_cast<double>(scores.size()));
  return rep;
}

}  // namespace ab3
