#include "ab3/trainer.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ab3/arith.hpp"
#include "ab3/error.hpp"

namespace ab3 {

using nlohmann::json;

void TrainConfig::validate(std::size_t rows) const {
  require(batch_size >= 1, ErrorKind::kInvalidArgument, "batch_size must be positive");
  require(batch_size <= rows, ErrorKind::kInvalidArgument,
          "batch_size " + std::to_string(batch_size) + " exceeds " + std::to_string(rows) +
              " rows");
  require(frac_bits >= FixedPointCodec::kMinFracBits && frac_bits <= FixedPointCodec::kMaxFracBits,
          ErrorKind::kInvalidArgument, "frac_bits out of range");
  require(eta0 > 0.0, ErrorKind::kInvalidArgument, "eta0 must be positive");
  require(lambda >= 0.0, ErrorKind::kInvalidArgument, "lambda must be non-negative");
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("train config: ") + e.what());
  }
  require(j.is_object(), ErrorKind::kParse, "train config must be a JSON object");
  TrainConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "batch_size") c.batch_size = v.get<std::size_t>();
      else if (key == "iterations") c.iterations = v.get<std::size_t>();
      else if (key == "frac_bits") c.frac_bits = v.get<int>();
      else if (key == "sigmoid")
        c.sigmoid = parse_sigmoid_kind(v.is_string() ? v.get<std::string>()
                                                     : std::to_string(v.get<int>()));
      else if (key == "eta0") c.eta0 = v.get<double>();
      else if (key == "lambda") c.lambda = v.get<double>();
      else if (key == "l2") c.l2 = v.get<bool>();
      else if (key == "class_weighting") c.class_weighting = v.get<bool>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "init_scale") c.init_scale = v.get<double>();
      else if (key == "literal_and") c.literal_and = v.get<bool>();
      else fail(ErrorKind::kParse, "train config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("train config: ") + e.what());
  }
  return c;
}

TrainConfig TrainConfig::load(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string TrainConfig::to_json() const {
  json j{{"batch_size", batch_size},
         {"iterations", iterations},
         {"frac_bits", frac_bits},
         {"sigmoid", sigmoid == SigmoidKind::kThreePiece ? 3 : 5},
         {"eta0", eta0},
         {"lambda", lambda},
         {"l2", l2},
         {"class_weighting", class_weighting},
         {"seed", seed},
         {"init_scale", init_scale},
         {"literal_and", literal_and}};
  return j.dump(2);
}

double learning_rate(std::size_t t, const TrainConfig& cfg) {
  return cfg.eta0 / (1.0 + cfg.lambda * cfg.eta0 * static_cast<double>(t));
}

ClassWeights ClassWeights::from_counts(std::size_t n, std::size_t n1) {
  require(n1 <= n, ErrorKind::kInvalidArgument, "positive count exceeds N");
  const std::size_t n0 = n - n1;
  require(n0 > 0 && n1 > 0, ErrorKind::kDegenerateClass,
          "class counts n0=" + std::to_string(n0) + " n1=" + std::to_string(n1) +
              ": a class is absent");
  ClassWeights cw;
  cw.n0 = n0;
  cw.n1 = n1;
  cw.c0 = static_cast<double>(n) / (2.0 * static_cast<double>(n0));
  cw.c1 = static_cast<double>(n) / (2.0 * static_cast<double>(n1));
  return cw;
}

ClassWeights compute_class_weights(Party& p, const ArithShare& labels) {
  ArithShare total{RingTensor::scalar(0), RingTensor::scalar(0)};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total.first[0] += labels.first[i];
    total.second[0] += labels.second[i];
  }
  u64 count = reveal(p, total)[0];
  if (labels.is_scaled()) count = ring::shift_right_arith(count, static_cast<unsigned>(p.frac_bits()));
  return ClassWeights::from_counts(labels.size(), static_cast<std::size_t>(count));
}

ArithShare select_weight(Party& p, const ArithShare& y, const ClassWeights& cw) {
  const u64 e0 = p.codec().encode(cw.c0);
  const u64 e1 = p.codec().encode(cw.c1);
  if (!y.is_scaled()) {
    // Integer difference of the encodings, so both endpoints are exact.
    ArithShare out = mul_public_raw(y, RingTensor::scalar(ring::sub(e1, e0)));
    out.set_scaled(true);
    return add_public(p, out, RingTensor::scalar(e0, true));
  }
  ArithShare out = mul_public(p, y, cw.c1 - cw.c0);
  return add_public(p, out, RingTensor::scalar(e0, true));
}

std::vector<double> initial_weights(std::size_t features, const TrainConfig& cfg) {
  std::mt19937_64 gen(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<double> w(features);
  for (auto& v : w) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    v = cfg.init_scale * (2.0 * u - 1.0);
  }
  return w;
}

ModelState init_model(const Party& p, std::size_t features, const TrainConfig& cfg) {
  const auto w = initial_weights(features, cfg);
  return {share_public(p, RingTensor::encode(Shape{features, 1}, w, p.codec())), 0};
}

std::vector<std::size_t> batch_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 gen(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(gen() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

std::vector<std::size_t> batch_rows(const std::vector<std::size_t>& perm, std::size_t batch_size,
                                    std::size_t t) {
  require(!perm.empty(), ErrorKind::kInvalidArgument, "empty permutation");
  std::vector<std::size_t> rows(batch_size);
  const std::size_t start = (t * batch_size) % perm.size();
  for (std::size_t j = 0; j < batch_size; ++j) rows[j] = perm[(start + j) % perm.size()];
  return rows;
}

ModelState train_step(Party& p, const ArithShare& x_batch, const ArithShare& y_batch,
                      const ModelState& state, const TrainConfig& cfg,
                      const std::optional<ClassWeights>& cw, std::size_t n_total) {
  require(x_batch.shape().size() == 2 && y_batch.shape().size() == 2 && y_batch.shape()[1] == 1 &&
              x_batch.shape()[0] == y_batch.shape()[0],
          ErrorKind::kShapeMismatch,
          "train_step: X " + shape_string(x_batch.shape()) + ", y " + shape_string(y_batch.shape()));
  require(state.w.shape() == Shape{x_batch.shape()[1], 1}, ErrorKind::kShapeMismatch,
          "train_step: w " + shape_string(state.w.shape()));
  const std::size_t b = x_batch.shape()[0];

  const ArithShare out = matmul(p, x_batch, state.w);
  const ArithShare yhat = eval_piecewise(p, sigmoid_spec(cfg.sigmoid), out,
                                         PiecewiseOptions{.literal_and = cfg.literal_and});

  ArithShare y_scaled = y_batch;
  if (!y_batch.is_scaled()) {
    y_scaled = mul_public_int(y_batch, i64{1} << p.frac_bits());
    y_scaled.set_scaled(true);
  }
  ArithShare dy = sub(yhat, y_scaled);
  if (cw) dy = mul(p, dy, select_weight(p, y_batch, *cw));

  const ArithShare g = matmul(p, x_batch.transposed(), dy);

  const double eta = learning_rate(state.t, cfg);
  const double decay = cfg.l2 ? 1.0 - eta * cfg.lambda / static_cast<double>(n_total) : 1.0;
  const ArithShare terms[] = {state.w, g};
  const double coeffs[] = {decay, -eta / static_cast<double>(b)};
  ModelState next{linear_combination(p, terms, coeffs, 0.0), state.t + 1};
  p.audit("train_step", next.w);
  return next;
}

TrainResult train(Party& p, const ArithShare& x, const ArithShare& y, const TrainConfig& cfg) {
  require(x.shape().size() == 2, ErrorKind::kShapeMismatch, "train: X must be a matrix");
  require(y.shape() == Shape{x.shape()[0], 1}, ErrorKind::kShapeMismatch,
          "train: y " + shape_string(y.shape()) + " for X " + shape_string(x.shape()));
  require(cfg.frac_bits == p.frac_bits(), ErrorKind::kInvalidArgument,
          "train config frac_bits differs from the party codec");
  const std::size_t n = x.shape()[0];
  cfg.validate(n);

  const CommStats before = p.net().stats();
  TrainResult res;
  if (cfg.class_weighting) res.class_weights = compute_class_weights(p, y);
  res.model = init_model(p, x.shape()[1], cfg);

  const auto perm = batch_permutation(n, cfg.seed);
  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    const auto rows = batch_rows(perm, cfg.batch_size, t);
    res.model = train_step(p, x.gather_rows(rows), y.gather_rows(rows), res.model, cfg,
                           res.class_weights, n);
  }
  res.stats = p.net().stats() - before;
  return res;
}

std::vector<int> predict(const std::vector<double>& w, const std::vector<double>& x_rowmajor,
                         std::size_t cols, SigmoidKind kind) {
  require(w.size() == cols, ErrorKind::kShapeMismatch, "predict: weight/feature count mismatch");
  const std::size_t rows = cols == 0 ? 0 : x_rowmajor.size() / cols;
  std::vector<int> out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < cols; ++j) z += x_rowmajor[i * cols + j] * w[j];
    out[i] = sigmoid_plain(z, kind) >= 0.5 ? 1 : 0;
  }
  return out;
}

}  // namespace ab3
