#pragma once

#include "rscn/numerics.hpp"

namespace rscn {

/// sqrt( Σ_{i,q} (pred − truth)² / (N·m) ). Throws ContractViolation on a
/// shape mismatch or an empty input.
double rmse(const Matrix& pred, const Matrix& truth);

}  // namespace rscn
