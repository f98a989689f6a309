#include "rscn/metrics.hpp"

#include <cmath>

#include "rscn/error.hpp"

namespace rscn {

double rmse(const Matrix& pred, const Matrix& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
    throw ContractViolation("rmse: prediction and truth shapes differ");
  }
  if (pred.size() == 0) throw ContractViolation("rmse: empty input");
  return std::sqrt((pred - truth).squaredNorm() / static_cast<double>(pred.size()));
}

}  // namespace rscn
