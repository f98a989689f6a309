#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rscn/model.hpp"
#include "rscn/numerics.hpp"
#include "rscn/rng.hpp"

namespace rscn {

struct Dataset {
  Matrix x;  // N x d
  Matrix y;  // N x m
  std::vector<ColumnRange> input_ranges;   // set by normalisation
  std::vector<ColumnRange> target_ranges;  // set by normalisation
  std::vector<bool> outlier_mask;          // empty, or N flags (true = corrupted output)

  std::size_t size() const noexcept { return static_cast<std::size_t>(x.rows()); }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(x.cols()); }
  std::size_t output_dim() const noexcept { return static_cast<std::size_t>(y.cols()); }
  bool is_normalized() const noexcept { return !input_ranges.empty() || !target_ranges.empty(); }
  std::size_t outlier_count() const;

  /// Rows at `indices`, in that order; mask carried along, ranges copied.
  Dataset subset(const std::vector<std::size_t>& indices) const;

  /// Throws ContractViolation on inconsistent row counts or mask length.
  void validate() const;
};

/// y = 0.2 e^{−(10x−4)²} + 0.5 e^{−(80x−40)²} + 0.3 e^{−(80x−20)²}.
double synthetic_target(double x);

/// Domain of the synthetic task; used to normalise its inputs.
inline constexpr ColumnRange kSyntheticDomain{-1.0, 1.0};

/// Training inputs uniform on [−1, 1] (raw, not normalised); test inputs a
/// regular grid on [−1, 1] with both endpoints exact. Outputs from
/// synthetic_target. Throws ContractViolation when a count is zero.
std::pair<Dataset, Dataset> generate_synthetic(std::size_t n_train, std::size_t n_test, Rng& rng);

/// Smooth three-input regression surface standing in for process data whose
/// records are not public: inputs uniform on [0, 1]³ and
///   y = 0.45 + 0.25 sin(π x₁) x₂ − 0.2 (x₃ − 0.5)² + 0.1 x₁ x₃.
Dataset generate_smooth_process(std::size_t n, Rng& rng);

enum class OutlierMode {
  /// Output replaced by a uniform draw from [low, high].
  Replace,
  /// Uniform draw from [low, high] added to the (normalised) output.
  Additive,
};

std::string to_string(OutlierMode mode);
OutlierMode outlier_mode_from_string(const std::string& s);

/// Corrupts the outputs of round-half-up(ζN) distinct rows chosen uniformly at
/// random and flags them in the mask. Inputs are never touched. Rows are
/// chosen first (partial Fisher–Yates), then one draw per output column per
/// row in selection order. Throws ContractViolation if ζ ∉ [0, 1] or low ≥ high.
Dataset inject_outliers(const Dataset& ds, double zeta, std::pair<double, double> noise_range, OutlierMode mode,
                        Rng& rng);

/// Number of rows inject_outliers corrupts: ⌊ζN + 1/2⌋.
std::size_t outlier_count_for(double zeta, std::size_t n);

/// Per-column min-max ranges of a matrix.
std::vector<ColumnRange> column_ranges(const Matrix& m);

/// Maps every column of `ds` to [0, 1] using its own min-max ranges.
/// Constant columns map to 0.5.
Dataset normalize(const Dataset& ds);

/// Maps `ds` with the given ranges (e.g. ones recorded on another split).
Dataset normalize_with(const Dataset& ds, std::vector<ColumnRange> input_ranges,
                       std::vector<ColumnRange> target_ranges);

/// Inverse target map: normalised predictions back to raw output units.
Matrix denormalize(const std::vector<ColumnRange>& ranges, const Matrix& values);
/// Same, using the dataset's recorded target ranges.
Matrix denormalize(const Dataset& ds, const Matrix& values);

/// Random partition into sizes round-half-up(fraction·N) and the remainder;
/// rows within each part keep their original relative order.
/// Throws ContractViolation unless 0 < fraction < 1.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, Rng& rng);

struct CsvSchema {
  /// Column selectors: a header name, or a 0-based index. Empty inputs means
  /// every column not used as an output; empty outputs means the last column.
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  bool has_header = false;
};

/// Comma-separated numeric file. Blank lines and KEEL-style '@' directive
/// lines are skipped. Throws IoError when unreadable and ParseError
/// (1-based data row, 1-based column) on non-numeric cells or ragged rows.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

}  // namespace rscn
