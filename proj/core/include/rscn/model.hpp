#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rscn/numerics.hpp"

namespace rscn {

enum class ActivationKind : std::uint8_t { Sigmoid = 0 };

std::string to_string(ActivationKind kind);

/// Overflow-safe logistic sigmoid; the result is strictly inside (0, 1) for
/// every finite z whose true value is representable.
double activate(ActivationKind kind, double z);

/// Applies the activation elementwise (vectorised). Agrees with `activate`
/// to within a few ulps.
void activate_inplace(ActivationKind kind, Eigen::Ref<Eigen::MatrixXd> z);

/// One hidden unit g(wᵀx + b).
struct HiddenNode {
  std::vector<double> w;
  double b = 0.0;

  std::size_t input_dim() const noexcept { return w.size(); }
  friend bool operator==(const HiddenNode&, const HiddenNode&) = default;
};

/// Per-column affine range recorded by min-max normalisation.
struct ColumnRange {
  double min = 0.0;
  double max = 1.0;

  bool degenerate() const noexcept { return !(max > min); }
  friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

struct Normalization {
  std::vector<ColumnRange> inputs;
  std::vector<ColumnRange> outputs;

  friend bool operator==(const Normalization&, const Normalization&) = default;
};

/// Single-hidden-layer network G(x) = Σ_j β_j g(w_jᵀx + b_j).
struct ScnModel {
  std::vector<HiddenNode> nodes;
  Matrix beta;  // L x m
  ActivationKind activation = ActivationKind::Sigmoid;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::optional<Normalization> normalization;

  std::size_t node_count() const noexcept { return nodes.size(); }
};

bool operator==(const ScnModel& a, const ScnModel& b);

/// h(X) = [g(wᵀx_1 + b), ..., g(wᵀx_N + b)]ᵀ.
/// Throws ContractViolation when x has a different column count than w.
Vector node_output(const HiddenNode& node, const Matrix& x, ActivationKind kind = ActivationKind::Sigmoid);

/// N x L hidden-layer output matrix H_L for the given nodes.
Matrix hidden_matrix(std::span<const HiddenNode> nodes, const Matrix& x, ActivationKind kind = ActivationKind::Sigmoid);

/// Whether `forward` receives already-normalised inputs or raw ones that must
/// first be mapped through the model's input ranges.
enum class InputScale { Normalized, Raw };

/// H_L · β. Throws EmptyModel for a model without nodes and ContractViolation
/// on a dimension mismatch. With InputScale::Raw and normalisation metadata,
/// inputs are normalised and outputs mapped back to the raw target range.
Matrix forward(const ScnModel& model, const Matrix& x, InputScale scale = InputScale::Normalized);

// Model container: a JSON document
//   {"format": "rscn-model", "version": 1, "activation": "sigmoid",
//    "input_dim": d, "output_dim": m, "node_count": L,
//    "nodes": [{"w": [...], "b": ...}, ...],
//    "beta": [[...m values...], ... L rows ...],
//    "normalization": null | {"inputs": [[min,max],...], "outputs": [[min,max],...]}}
// Doubles are written in shortest round-trip form, so finite values survive
// a save/load cycle bit-exactly.
inline constexpr int kModelFormatVersion = 1;

void save_model(const ScnModel& model, std::ostream& sink);
void save_model(const ScnModel& model, const std::string& path);

/// Throws DeserializationError (with the byte offset reached) on malformed
/// input, unexpected format tag, version mismatch or inconsistent dimensions.
ScnModel load_model(std::istream& source);
ScnModel load_model_file(const std::string& path);

}  // namespace rscn

namespace rscn {

/// Maps v into [0, 1] under `range`; degenerate (constant) ranges map to 0.5.
inline double normalize_value(const ColumnRange& range, double v) {
  return range.degenerate() ? 0.5 : (v - range.min) / (range.max - range.min);
}

/// Inverse of normalize_value; degenerate ranges map back to their constant.
inline double denormalize_value(const ColumnRange& range, double u) {
  return range.degenerate() ? range.min : range.min + u * (range.max - range.min);
}

}  // namespace rscn
