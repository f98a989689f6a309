#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rscn {

/// Dense row-major real matrix. Hidden-layer outputs, targets, output weights
/// and residuals are all stored this way.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Non-negative per-sample weights, i.e. the diagonal of Λ. `sqrt_view()` is
/// the diagonal of Θ, so Λ = Θ².
class DiagonalWeights {
 public:
  DiagonalWeights() = default;
  /// Throws ContractViolation if any entry is negative or not finite.
  explicit DiagonalWeights(std::vector<double> entries);

  static DiagonalWeights uniform(std::size_t n, double value = 1.0);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  std::span<const double> entries() const noexcept { return entries_; }

  Vector as_vector() const;
  Vector sqrt_view() const;

  /// Same weights multiplied by c > 0.
  DiagonalWeights scaled(double c) const;

 private:
  std::vector<double> entries_;
};

/// Moore–Penrose pseudoinverse by SVD. Singular values at or below
/// `tol * sigma_max` are treated as zero; `tol == 0` selects
/// max(rows, cols) * machine epsilon.
Matrix pinv(const Matrix& m, double tol = 0.0);

/// Default relative cutoff used by `pinv` for a rows x cols matrix.
double default_pinv_tolerance(Eigen::Index rows, Eigen::Index cols);

enum class WlsRoute {
  /// (HᵀΛH)† HᵀΛT with the Gram matrix formed explicitly.
  NormalEquations,
  /// Minimum-norm least squares on (ΘH, ΘT) by complete orthogonal
  /// decomposition. Same minimiser, conditioning of H rather than HᵀH.
  ScaledOrthogonal,
};

/// β* = argmin (Hβ − T)ᵀ Λ (Hβ − T), returned as an L×m matrix.
/// Throws ContractViolation on non-conformal shapes.
Matrix weighted_least_squares(const Matrix& h, const DiagonalWeights& lam, const Matrix& t, double tol = 0.0,
                              WlsRoute route = WlsRoute::NormalEquations);

/// Frobenius norm of Θ·e, i.e. sqrt(Σ_i θ_i ‖e_i‖²).
double weighted_frobenius_norm(const Matrix& e, const DiagonalWeights& lam);

}  // namespace rscn
