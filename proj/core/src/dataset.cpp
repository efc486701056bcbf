#include "ab3/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "ab3/error.hpp"

namespace ab3 {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  const std::string where = " at line " + std::to_string(line_no);
  require(!s.empty(), ErrorKind::kParse, "empty cell" + where);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(end == s.c_str() + s.size(), ErrorKind::kParse, "not a number '" + s + "'" + where);
  require(std::isfinite(v), ErrorKind::kParse, "non-finite value '" + s + "'" + where);
  return v;
}

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& gen) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[gen() % i]);
}

}  // namespace

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
}

Dataset Dataset::subset(std::span<const std::size_t> row_ids) const {
  Dataset d;
  d.rows = row_ids.size();
  d.cols = cols;
  d.feature_names = feature_names;
  d.x.reserve(d.rows * cols);
  d.y.reserve(d.rows);
  for (std::size_t r : row_ids) {
    require(r < rows, ErrorKind::kInvalidArgument, "row index out of range");
    d.x.insert(d.x.end(), x.begin() + static_cast<std::ptrdiff_t>(r * cols),
               x.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
    d.y.push_back(y[r]);
  }
  return d;
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  require(begin <= end && end <= rows, ErrorKind::kInvalidArgument, "bad row slice");
  std::vector<std::size_t> ids(end - begin);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = begin + i;
  return subset(ids);
}

RingTensor Dataset::encode_features(const FixedPointCodec& codec) const {
  return RingTensor::encode(Shape{rows, cols}, x, codec);
}

RingTensor Dataset::label_tensor() const {
  RingTensor t(Shape{rows, 1});
  for (std::size_t i = 0; i < rows; ++i) t[i] = static_cast<u64>(y[i]);
  return t;
}

Dataset parse_csv(std::istream& in, const CsvOptions& opts) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> header;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (opts.has_header && header.empty()) {
      header = std::move(cells);
      continue;
    }
    table.push_back(std::move(cells));
    line_numbers.push_back(line_no);
  }
  require(!table.empty(), ErrorKind::kParse, "csv has no data rows");
  const std::size_t width = header.empty() ? table.front().size() : header.size();
  require(width >= 2, ErrorKind::kParse, "csv needs at least one feature and a label");
  for (std::size_t r = 0; r < table.size(); ++r)
    require(table[r].size() == width, ErrorKind::kParse,
            "ragged row at line " + std::to_string(line_numbers[r]) + ": " +
                std::to_string(table[r].size()) + " cells, expected " + std::to_string(width));

  std::size_t label = width - 1;
  if (opts.label_column == "first") {
    label = 0;
  } else if (opts.label_column != "last") {
    require(!header.empty(), ErrorKind::kInvalidArgument,
            "label column by name needs a header row");
    const auto it = std::find(header.begin(), header.end(), opts.label_column);
    require(it != header.end(), ErrorKind::kInvalidArgument,
            "label column '" + opts.label_column + "' not in header");
    label = static_cast<std::size_t>(it - header.begin());
  }

  Dataset d;
  d.rows = table.size();
  d.cols = width - 1;
  d.x.reserve(d.rows * d.cols);
  for (std::size_t c = 0; c < width; ++c)
    if (c != label)
      d.feature_names.push_back(header.empty() ? "x" + std::to_string(d.feature_names.size())
                                               : header[c]);
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label) {
        const double v = parse_number(table[r][c], line_numbers[r]);
        require(v == 0.0 || v == 1.0, ErrorKind::kParse,
                "label '" + table[r][c] + "' at line " + std::to_string(line_numbers[r]) +
                    " is not 0 or 1");
        d.y.push_back(static_cast<int>(v));
      } else {
        d.x.push_back(parse_number(table[r][c], line_numbers[r]));
      }
    }
  }
  if (opts.standardize) standardize(d);
  return d;
}

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::kIo, "cannot open " + path);
  return parse_csv(in, opts);
}

void standardize(Dataset& d) {
  if (d.rows == 0) return;
  for (std::size_t c = 0; c < d.cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < d.rows; ++r) mean += d.at(r, c);
    mean /= static_cast<double>(d.rows);
    double var = 0.0;
    for (std::size_t r = 0; r < d.rows; ++r) var += (d.at(r, c) - mean) * (d.at(r, c) - mean);
    var /= static_cast<double>(d.rows);
    const double sd = var > 1e-24 ? std::sqrt(var) : 1.0;
    for (std::size_t r = 0; r < d.rows; ++r) d.x[r * d.cols + c] = (d.at(r, c) - mean) / sd;
  }
}

ColumnSelection select_columns(const Dataset& d, const std::vector<std::string>& names) {
  require(!names.empty(), ErrorKind::kInvalidArgument, "column list is empty");
  ColumnSelection sel;
  std::vector<std::size_t> keep;
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) continue;
    const auto it = std::find(d.feature_names.begin(), d.feature_names.end(), n);
    if (it == d.feature_names.end()) {
      sel.missing.push_back(n);
      continue;
    }
    keep.push_back(static_cast<std::size_t>(it - d.feature_names.begin()));
  }
  require(!keep.empty(), ErrorKind::kInvalidArgument, "none of the requested columns exist");
  Dataset& out = sel.data;
  out.rows = d.rows;
  out.cols = keep.size();
  out.y = d.y;
  for (std::size_t c : keep) out.feature_names.push_back(d.feature_names[c]);
  out.x.reserve(out.rows * out.cols);
  for (std::size_t r = 0; r < d.rows; ++r)
    for (std::size_t c : keep) out.x.push_back(d.at(r, c));
  return sel;
}

std::vector<std::string> read_names_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::kIo, "cannot open " + path);
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    std::string n = trim(line);
    if (!n.empty()) names.push_back(std::move(n));
  }
  return names;
}

Dataset make_separable(std::size_t n, std::size_t f, std::uint64_t seed, double margin) {
  require(n > 1 && f > 0, ErrorKind::kInvalidArgument, "make_separable: empty shape");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::vector<double> dir(f);
  double norm = 0.0;
  for (auto& v : dir) {
    v = normal(gen);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (auto& v : dir) v /= norm;

  Dataset d;
  d.rows = n;
  d.cols = f;
  d.x.reserve(n * f);
  for (std::size_t j = 0; j < f; ++j) d.feature_names.push_back("x" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    // Alternate classes so both are always present.
    const int label = static_cast<int>(i % 2);
    std::vector<double> row(f);
    double proj = 0.0;
    for (std::size_t j = 0; j < f; ++j) {
      row[j] = normal(gen);
      proj += row[j] * dir[j];
    }
    // Move the point along dir so its signed distance is margin + |proj|.
    const double target = (label == 1 ? 1.0 : -1.0) * (margin + std::fabs(proj));
    for (std::size_t j = 0; j < f; ++j) row[j] += (target - proj) * dir[j];
    d.x.insert(d.x.end(), row.begin(), row.end());
    d.y.push_back(label);
  }
  return d;
}

Dataset make_gaussian_classes(std::size_t n, std::size_t f, double positive_fraction,
                              double separation, double label_noise, std::uint64_t seed) {
  require(n > 1 && f > 0, ErrorKind::kInvalidArgument, "make_gaussian_classes: empty shape");
  require(positive_fraction > 0.0 && positive_fraction < 1.0, ErrorKind::kInvalidArgument,
          "positive_fraction must lie in (0, 1)");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  const auto n1 = static_cast<std::size_t>(std::llround(positive_fraction * static_cast<double>(n)));
  const std::size_t informative = std::min<std::size_t>(f, 5);
  const double shift = 0.5 * separation / std::sqrt(static_cast<double>(informative));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  shuffle(order, gen);

  Dataset d;
  d.rows = n;
  d.cols = f;
  d.x.resize(n * f);
  d.y.assign(n, 0);
  for (std::size_t j = 0; j < f; ++j) d.feature_names.push_back("x" + std::to_string(j));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    const int label = k < n1 ? 1 : 0;
    d.y[i] = label;
    for (std::size_t j = 0; j < f; ++j) {
      double v = normal(gen);
      if (j < informative) v += label == 1 ? shift : -shift;
      d.x[i * f + j] = v;
    }
  }

  // Noise swaps labels between equally many rows of each class, so the class
  // counts stay as requested.
  const auto swaps = static_cast<std::size_t>(
      std::llround(label_noise * static_cast<double>(n) / 2.0));
  std::vector<std::size_t> pos, negs;
  for (std::size_t i = 0; i < n; ++i) (d.y[i] == 1 ? pos : negs).push_back(i);
  shuffle(pos, gen);
  shuffle(negs, gen);
  for (std::size_t k = 0; k < swaps && k < pos.size() && k < negs.size(); ++k) {
    d.y[pos[k]] = 0;
    d.y[negs[k]] = 1;
  }
  return d;
}

Dataset make_gse_like(std::uint64_t seed) {
  return make_gaussian_classes(225, 67, 142.0 / 225.0, 2.4, 0.2, seed);
}

Dataset make_imbalanced(std::uint64_t seed) {
  const Dataset g = make_gaussian_classes(500, 19, 0.1, 2.0, 0.0, seed);
  Dataset d = g;
  d.cols = 20;
  d.x.clear();
  d.x.reserve(d.rows * d.cols);
  for (std::size_t r = 0; r < g.rows; ++r) {
    for (std::size_t c = 0; c < g.cols; ++c) d.x.push_back(g.at(r, c));
    d.x.push_back(1.0);
  }
  d.feature_names.push_back("bias");
  return d;
}

}  // namespace ab3
