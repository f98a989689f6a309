#include "rscn/numerics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rscn/error.hpp"

namespace rscn {

DiagonalWeights::DiagonalWeights(std::vector<double> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!std::isfinite(entries_[i]) || entries_[i] < 0.0) {
      throw ContractViolation("diagonal weight " + std::to_string(i) + " must be finite and non-negative");
    }
  }
}

DiagonalWeights DiagonalWeights::uniform(std::size_t n, double value) {
  return DiagonalWeights(std::vector<double>(n, value));
}

Vector DiagonalWeights::as_vector() const {
  return Eigen::Map<const Vector>(entries_.data(), static_cast<Eigen::Index>(entries_.size()));
}

Vector DiagonalWeights::sqrt_view() const { return as_vector().cwiseSqrt(); }

DiagonalWeights DiagonalWeights::scaled(double c) const {
  if (!(c > 0.0)) throw ContractViolation("weight scale factor must be positive");
  std::vector<double> out(entries_);
  for (double& v : out) v *= c;
  return DiagonalWeights(std::move(out));
}

double default_pinv_tolerance(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

Matrix pinv(const Matrix& m, double tol) {
  if (m.size() == 0) throw ContractViolation("pinv of an empty matrix");
  if (tol < 0.0) throw ContractViolation("pinv tolerance must be non-negative");
  if (!m.allFinite()) throw NumericalFailure("pinv input contains non-finite entries");
  if (tol == 0.0) tol = default_pinv_tolerance(m.rows(), m.cols());

  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalFailure("SVD did not converge");

  const Vector& s = svd.singularValues();
  const double cutoff = tol * (s.size() > 0 ? s(0) : 0.0);
  Vector s_inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) s_inv(i) = 1.0 / s(i);
  }
  Matrix out = svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
  if (!out.allFinite()) throw NumericalFailure("pinv produced non-finite entries");
  return out;
}

namespace {

void check_wls_shapes(const Matrix& h, const DiagonalWeights& lam, const Matrix& t) {
  if (h.rows() != t.rows()) {
    throw ContractViolation("weighted_least_squares: H has " + std::to_string(h.rows()) + " rows but T has " +
                            std::to_string(t.rows()));
  }
  if (static_cast<Eigen::Index>(lam.size()) != h.rows()) {
    throw ContractViolation("weighted_least_squares: " + std::to_string(lam.size()) + " weights for " +
                            std::to_string(h.rows()) + " samples");
  }
}

}  // namespace

Matrix weighted_least_squares(const Matrix& h, const DiagonalWeights& lam, const Matrix& t, double tol,
                              WlsRoute route) {
  check_wls_shapes(h, lam, t);
  if (h.cols() == 0) return Matrix(0, t.cols());
  if (h.rows() == 0) return Matrix::Zero(h.cols(), t.cols());

  if (route == WlsRoute::NormalEquations) {
    const Vector w = lam.as_vector();
    const Matrix weighted_h_t = h.transpose() * w.asDiagonal();  // HᵀΛ
    const Matrix gram = weighted_h_t * h;
    return pinv(gram, tol) * (weighted_h_t * t);
  }

  const Vector s = lam.sqrt_view();
  const Eigen::MatrixXd scaled_h = s.asDiagonal() * h;
  const Eigen::MatrixXd scaled_t = s.asDiagonal() * t;
  // The threshold must be in place before the factorisation: the rank it
  // implies shapes the orthogonal complement built during compute().
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(scaled_h.rows(), scaled_h.cols());
  cod.setThreshold(tol == 0.0 ? default_pinv_tolerance(h.rows(), h.cols()) : tol);
  cod.compute(scaled_h);
  Matrix beta = cod.solve(scaled_t);
  if (!beta.allFinite()) throw NumericalFailure("weighted least squares produced non-finite output weights");
  return beta;
}

double weighted_frobenius_norm(const Matrix& e, const DiagonalWeights& lam) {
  if (static_cast<Eigen::Index>(lam.size()) != e.rows()) {
    throw ContractViolation("weighted_frobenius_norm: weight count does not match residual rows");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < e.rows(); ++i) acc += lam[static_cast<std::size_t>(i)] * e.row(i).squaredNorm();
  return std::sqrt(acc);
}

}  // namespace rscn
