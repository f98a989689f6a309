#include "rscn/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "rscn/error.hpp"

namespace rscn {

std::size_t Dataset::outlier_count() const {
  return static_cast<std::size_t>(std::count(outlier_mask.begin(), outlier_mask.end(), true));
}

void Dataset::validate() const {
  if (x.rows() != y.rows()) throw ContractViolation("dataset: input and output row counts differ");
  if (!outlier_mask.empty() && outlier_mask.size() != size()) {
    throw ContractViolation("dataset: outlier mask length differs from sample count");
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(indices.size()), x.cols());
  out.y.resize(static_cast<Eigen::Index>(indices.size()), y.cols());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(indices[k]);
    out.x.row(static_cast<Eigen::Index>(k)) = x.row(i);
    out.y.row(static_cast<Eigen::Index>(k)) = y.row(i);
  }
  if (!outlier_mask.empty()) {
    out.outlier_mask.reserve(indices.size());
    for (auto i : indices) out.outlier_mask.push_back(outlier_mask[i]);
  }
  out.input_ranges = input_ranges;
  out.target_ranges = target_ranges;
  return out;
}

double synthetic_target(double x) {
  const double a = 10.0 * x - 4.0;
  const double b = 80.0 * x - 40.0;
  const double c = 80.0 * x - 20.0;
  return 0.2 * std::exp(-a * a) + 0.5 * std::exp(-b * b) + 0.3 * std::exp(-c * c);
}

std::pair<Dataset, Dataset> generate_synthetic(std::size_t n_train, std::size_t n_test, Rng& rng) {
  if (n_train == 0 || n_test == 0) throw ContractViolation("generate_synthetic: sample counts must be positive");
  Dataset train;
  train.x.resize(static_cast<Eigen::Index>(n_train), 1);
  train.y.resize(static_cast<Eigen::Index>(n_train), 1);
  for (Eigen::Index i = 0; i < train.x.rows(); ++i) {
    train.x(i, 0) = rng.uniform(-1.0, 1.0);
    train.y(i, 0) = synthetic_target(train.x(i, 0));
  }
  train.outlier_mask.assign(n_train, false);

  Dataset test;
  test.x.resize(static_cast<Eigen::Index>(n_test), 1);
  test.y.resize(static_cast<Eigen::Index>(n_test), 1);
  for (std::size_t i = 0; i < n_test; ++i) {
    const double v = n_test == 1 ? -1.0 : -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n_test - 1);
    test.x(static_cast<Eigen::Index>(i), 0) = v;
    test.y(static_cast<Eigen::Index>(i), 0) = synthetic_target(v);
  }
  test.outlier_mask.assign(n_test, false);
  return {std::move(train), std::move(test)};
}

Dataset generate_smooth_process(std::size_t n, Rng& rng) {
  if (n == 0) throw ContractViolation("generate_smooth_process: sample count must be positive");
  Dataset ds;
  ds.x.resize(static_cast<Eigen::Index>(n), 3);
  ds.y.resize(static_cast<Eigen::Index>(n), 1);
  for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) ds.x(i, j) = rng.uniform01();
    const double x1 = ds.x(i, 0), x2 = ds.x(i, 1), x3 = ds.x(i, 2);
    ds.y(i, 0) = 0.45 + 0.25 * std::sin(std::numbers::pi * x1) * x2 - 0.2 * (x3 - 0.5) * (x3 - 0.5) + 0.1 * x1 * x3;
  }
  ds.outlier_mask.assign(n, false);
  return ds;
}

std::string to_string(OutlierMode mode) { return mode == OutlierMode::Replace ? "replace" : "additive"; }

OutlierMode outlier_mode_from_string(const std::string& s) {
  if (s == "replace") return OutlierMode::Replace;
  if (s == "additive") return OutlierMode::Additive;
  throw ContractViolation("unknown outlier mode '" + s + "' (expected replace or additive)");
}

std::size_t outlier_count_for(double zeta, std::size_t n) {
  return static_cast<std::size_t>(std::floor(zeta * static_cast<double>(n) + 0.5));
}

Dataset inject_outliers(const Dataset& ds, double zeta, std::pair<double, double> noise_range, OutlierMode mode,
                        Rng& rng) {
  ds.validate();
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw ContractViolation("inject_outliers: zeta must lie in [0, 1]");
  const auto [low, high] = noise_range;
  if (!(low < high)) throw ContractViolation("inject_outliers: noise range must satisfy low < high");

  Dataset out = ds;
  const std::size_t n = ds.size();
  if (out.outlier_mask.empty()) out.outlier_mask.assign(n, false);
  const std::size_t count = std::min(outlier_count_for(zeta, n), n);

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(n - k));
    std::swap(idx[k], idx[j]);
  }
  for (std::size_t k = 0; k < count; ++k) {
    const auto i = static_cast<Eigen::Index>(idx[k]);
    for (Eigen::Index q = 0; q < out.y.cols(); ++q) {
      const double noise = rng.uniform(low, high);
      out.y(i, q) = mode == OutlierMode::Replace ? noise : out.y(i, q) + noise;
    }
    out.outlier_mask[idx[k]] = true;
  }
  return out;
}

std::vector<ColumnRange> column_ranges(const Matrix& m) {
  std::vector<ColumnRange> out;
  out.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (m.rows() == 0) {
      out.push_back({0.0, 1.0});
    } else {
      out.push_back({m.col(j).minCoeff(), m.col(j).maxCoeff()});
    }
  }
  return out;
}

namespace {

Matrix map_columns(const Matrix& m, const std::vector<ColumnRange>& ranges, bool forward) {
  if (static_cast<Eigen::Index>(ranges.size()) != m.cols()) {
    throw ContractViolation("normalisation range count does not match column count");
  }
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto& r = ranges[static_cast<std::size_t>(j)];
      out(i, j) = forward ? normalize_value(r, m(i, j)) : denormalize_value(r, m(i, j));
    }
  }
  return out;
}

}  // namespace

Dataset normalize_with(const Dataset& ds, std::vector<ColumnRange> input_ranges,
                       std::vector<ColumnRange> target_ranges) {
  ds.validate();
  Dataset out;
  out.x = map_columns(ds.x, input_ranges, true);
  out.y = map_columns(ds.y, target_ranges, true);
  out.input_ranges = std::move(input_ranges);
  out.target_ranges = std::move(target_ranges);
  out.outlier_mask = ds.outlier_mask;
  return out;
}

Dataset normalize(const Dataset& ds) { return normalize_with(ds, column_ranges(ds.x), column_ranges(ds.y)); }

Matrix denormalize(const std::vector<ColumnRange>& ranges, const Matrix& values) {
  return map_columns(values, ranges, false);
}

Matrix denormalize(const Dataset& ds, const Matrix& values) { return denormalize(ds.target_ranges, values); }

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, Rng& rng) {
  ds.validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ContractViolation("split: train fraction must lie in (0, 1)");
  }
  const std::size_t n = ds.size();
  const std::size_t n_train = std::min(outlier_count_for(train_fraction, n), n);

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(n - k));
    std::swap(idx[k], idx[j]);
  }
  std::vector<std::size_t> a(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> b(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return {ds.subset(a), ds.subset(b)};
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::size_t resolve_column(const std::string& selector, const std::vector<std::string>& header, std::size_t width) {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == selector) return j;
  }
  std::size_t idx = 0;
  const auto* first = selector.data();
  const auto* last = first + selector.size();
  const auto [ptr, ec] = std::from_chars(first, last, idx);
  if (ec != std::errc{} || ptr != last) throw ContractViolation("unknown CSV column '" + selector + "'");
  if (idx >= width) throw ContractViolation("CSV column index " + selector + " out of range");
  return idx;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV file '" + path + "'");

  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  bool header_pending = schema.has_header;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '@') continue;
    const auto fields = split_fields(view);
    if (header_pending) {
      for (auto f : fields) header.emplace_back(f);
      width = header.size();
      header_pending = false;
      continue;
    }
    const std::size_t row_no = rows.size() + 1;
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw ParseError(row_no, std::min(fields.size(), width) + 1,
                       "expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> values(width);
    for (std::size_t j = 0; j < width; ++j) {
      const auto f = fields[j];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[j]);
      if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(values[j])) {
        throw ParseError(row_no, j + 1, "non-numeric cell '" + std::string(f) + "'");
      }
    }
    rows.push_back(std::move(values));
  }
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  if (rows.empty()) throw ParseError(1, 1, "no data rows");

  std::vector<std::size_t> outputs;
  for (const auto& s : schema.outputs) outputs.push_back(resolve_column(s, header, width));
  if (outputs.empty()) outputs.push_back(width - 1);
  std::vector<std::size_t> inputs;
  for (const auto& s : schema.inputs) inputs.push_back(resolve_column(s, header, width));
  if (inputs.empty()) {
    for (std::size_t j = 0; j < width; ++j) {
      if (std::find(outputs.begin(), outputs.end(), j) == outputs.end()) inputs.push_back(j);
    }
  }
  if (inputs.empty()) throw ContractViolation("CSV schema selects no input columns");

  Dataset ds;
  ds.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(inputs.size()));
  ds.y.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(outputs.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < inputs.size(); ++j)
      ds.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][inputs[j]];
    for (std::size_t q = 0; q < outputs.size(); ++q)
      ds.y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q)) = rows[i][outputs[q]];
  }
  ds.outlier_mask.assign(rows.size(), false);
  return ds;
}

}  // namespace rscn
