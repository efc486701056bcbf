#include "ab3/piecewise.hpp"

#include <algorithm>
#include <cmath>

#include "ab3/arith.hpp"
#include "ab3/boolean.hpp"
#include "ab3/error.hpp"

namespace ab3 {

PiecewiseSpec::PiecewiseSpec(std::vector<double> segment_points, std::vector<Affine> pieces)
    : points_(std::move(segment_points)), pieces_(std::move(pieces)) {
  require(!pieces_.empty(), ErrorKind::kInvalidArgument, "piecewise spec needs a piece");
  require(pieces_.size() == points_.size() + 1, ErrorKind::kInvalidArgument,
          "piecewise spec needs exactly one more piece than segment points");
  for (std::size_t i = 1; i < points_.size(); ++i)
    require(points_[i - 1] < points_[i], ErrorKind::kInvalidArgument,
            "segment points must be strictly ascending");
}

std::size_t PiecewiseSpec::segment_of(double x) const {
  // Number of points s with !(x < s).
  return static_cast<std::size_t>(std::upper_bound(points_.begin(), points_.end(), x) -
                                  points_.begin());
}

double PiecewiseSpec::eval(double x) const { return pieces_[segment_of(x)](x); }

SigmoidKind parse_sigmoid_kind(std::string_view s) {
  if (s == "3" || s == "three" || s == "3-piece") return SigmoidKind::kThreePiece;
  if (s == "5" || s == "five" || s == "5-piece") return SigmoidKind::kFivePiece;
  fail(ErrorKind::kParse, "unknown sigmoid kind '" + std::string(s) + "' (expected 3 or 5)");
}

std::string_view to_string(SigmoidKind k) {
  return k == SigmoidKind::kThreePiece ? "3-piece" : "5-piece";
}

const PiecewiseSpec& sigmoid_spec(SigmoidKind kind) {
  static const PiecewiseSpec three({-0.5, 0.5}, {{0.0, 0.0}, {1.0, 0.5}, {0.0, 1.0}});
  static const PiecewiseSpec five({-5.0, -2.5, 2.5, 5.0}, {{0.0, 1e-4},
                                                           {0.02776, 0.145},
                                                           {0.17, 0.5},
                                                           {0.02776, 0.85498},
                                                           {0.0, 1.0 - 1e-4}});
  return kind == SigmoidKind::kThreePiece ? three : five;
}

double sigmoid_plain(double x, SigmoidKind kind) { return sigmoid_spec(kind).eval(x); }

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

ArithShare eval_piecewise(Party& p, const PiecewiseSpec& spec, const ArithShare& x,
                          const PiecewiseOptions& opts) {
  require(x.is_scaled(), ErrorKind::kScaleMismatch, "piecewise input must be fixed-point");
  const std::size_t n = spec.num_pieces();
  const int f = p.frac_bits();
  const int coef = p.coef_bits();

  // f_i(x) at scale f + coef for every piece.
  std::vector<ArithShare> values;
  values.reserve(n);
  for (const auto& piece : spec.pieces()) {
    ArithShare v = mul_public_raw(x, RingTensor::scalar(FixedPointCodec::encode_at(piece.slope, coef)));
    v = add_public(p, v, RingTensor::scalar(FixedPointCodec::encode_at(piece.intercept, f + coef), true));
    values.push_back(std::move(v));
  }

  if (n == 1) return truncate(p, values.front(), coef);

  // p_1..p_{n-1}; p_0 = 0 and p_n = 1 are public.
  const auto preds = lt_const_batch(p, x, spec.segment_points());
  const BoolShare zero = bool_share_public(p, RingTensor(x.shape()), 1);
  std::vector<BoolShare> pfull;
  pfull.reserve(n + 1);
  pfull.push_back(zero);
  pfull.insert(pfull.end(), preds.begin(), preds.end());
  pfull.push_back(bool_not(p, zero));

  std::vector<BoolShare> indicators;
  if (opts.literal_and) {
    std::vector<std::pair<BoolShare, BoolShare>> work;
    for (std::size_t i = 0; i < n; ++i) work.emplace_back(bool_not(p, pfull[i]), pfull[i + 1]);
    indicators = bool_and_batch(p, work);
  } else {
    for (std::size_t i = 0; i < n; ++i) indicators.push_back(bool_xor(pfull[i], pfull[i + 1]));
  }
  if (opts.predicates_out) *opts.predicates_out = preds;
  if (opts.indicators_out) *opts.indicators_out = indicators;

  // One batched injection over the stacked pieces.
  std::vector<RingTensor> bf, bs, vf, vs;
  for (std::size_t i = 0; i < n; ++i) {
    bf.push_back(indicators[i].first);
    bs.push_back(indicators[i].second);
    vf.push_back(values[i].first);
    vs.push_back(values[i].second);
  }
  const BoolShare b_all{concat(bf), concat(bs), 1};
  ArithShare v_all{concat(vf), concat(vs)};
  v_all.set_scaled(true);
  const ArithShare selected = bit_inject(p, b_all, v_all);

  const std::size_t m = x.size();
  ArithShare acc{RingTensor(x.shape(), true), RingTensor(x.shape(), true)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      acc.first[k] += selected.first[i * m + k];
      acc.second[k] += selected.second[i * m + k];
    }
  ArithShare out = truncate(p, acc, coef);
  p.audit("piecewise", out);
  return out;
}

ArithShare sigmoid(Party& p, const ArithShare& x, SigmoidKind kind) {
  return eval_piecewise(p, sigmoid_spec(kind), x);
}

std::vector<double> make_grid(double from, double to, double step) {
  require(step > 0 && to >= from, ErrorKind::kInvalidArgument, "bad grid");
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = from + static_cast<double>(i) * step;
  return g;
}

SigmoidErrorReport sigmoid_error_report(SigmoidKind kind, double from, double to, double step,
                                        int frac_bits) {
  const std::vector<double> grid = make_grid(from, to, step);
  PartySimConfig cfg;
  cfg.party.frac_bits = frac_bits;
  const FixedPointCodec codec(frac_bits);
  auto run = simulate_parties(
      [&](Party& p) {
        RingTensor input(Shape{grid.size()}, true);
        if (p.id() == PartyId(0)) input = RingTensor::encode(Shape{grid.size()}, grid, codec);
        const ArithShare x = share(p, PartyId(0), input);
        return reveal(p, sigmoid(p, x, kind));
      },
      cfg);
  const auto approx = run.outputs[0].decode(codec);

  SigmoidErrorReport rep;
  rep.kind = kind;
  rep.rows.reserve(grid.size());
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = codec.decode(codec.encode(grid[i]));
    SigmoidErrorRow row{x, approx[i], logistic(x), std::fabs(approx[i] - logistic(x))};
    total += row.error;
    if (row.error > rep.max_abs_error) {
      rep.max_abs_error = row.error;
      rep.argmax = x;
    }
    rep.rows.push_back(row);
  }
  rep.mean_abs_error = grid.empty() ? 0.0 : total / static_cast<double>(grid.size());
  return rep;
}

}  // namespace ab3
