#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ab3/ring.hpp"

namespace ab3 {

// Plaintext feature matrix (row-major) with binary labels.
struct Dataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> x;
  std::vector<int> y;
  std::vector<std::string> feature_names;

  double at(std::size_t r, std::size_t c) const { return x[r * cols + c]; }
  std::size_t positives() const;

  Dataset subset(std::span<const std::size_t> row_ids) const;
  // Rows [begin, end).
  Dataset slice(std::size_t begin, std::size_t end) const;

  // Fixed-point N x f features and unscaled N x 1 labels.
  RingTensor encode_features(const FixedPointCodec& codec) const;
  RingTensor label_tensor() const;
};

struct CsvOptions {
  bool has_header = true;
  // "last", "first", or a header name.
  std::string label_column = "last";
  bool standardize = true;
};

/// Errors: kParse for ragged rows, non-numeric or NaN cells and labels other
/// than 0/1; kIo when the file cannot be read.
Dataset load_csv(const std::string& path, const CsvOptions& opts = {});
Dataset parse_csv(std::istream& in, const CsvOptions& opts = {});

/// Per-column z-score. Constant columns are only centered.
void standardize(Dataset& d);

struct ColumnSelection {
  Dataset data;
  std::vector<std::string> missing;  // requested names not found (one warning each)
};

/// Keeps the named columns in the order given, skipping unknown names and
/// repeats. kInvalidArgument when nothing remains or the list is empty.
ColumnSelection select_columns(const Dataset& d, const std::vector<std::string>& names);
/// One name per line (blank lines and surrounding whitespace ignored).
std::vector<std::string> read_names_file(const std::string& path);

// Synthetic data. All generators are deterministic in the seed.

/// Two classes split by a random hyperplane through the origin, with every
/// point at least `margin` away from it.
Dataset make_separable(std::size_t n, std::size_t f, std::uint64_t seed, double margin = 0.5);

/// Gaussian classes with `positive_fraction` of the rows labeled 1 and mean
/// shift `separation` spread over the first few features, then a fraction
/// `label_noise` of labels flipped.
Dataset make_gaussian_classes(std::size_t n, std::size_t f, double positive_fraction,
                              double separation, double label_noise, std::uint64_t seed);

/// 225 x 67 with a 142:83 (63:37) class split and label noise, the shape of
/// the GSE2034 signature data.
Dataset make_gse_like(std::uint64_t seed);

/// N=500, f=20, 9:1 with the positive class as the minority. The last
/// feature is a constant 1: the model has no separate bias term, and without
/// one the class weights cannot move the decision threshold.
Dataset make_imbalanced(std::uint64_t seed);

}  // namespace ab3
