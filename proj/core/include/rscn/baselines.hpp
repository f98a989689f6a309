#pragma once

#include <cstdint>

#include "rscn/model.hpp"
#include "rscn/numerics.hpp"
#include "rscn/robust.hpp"
#include "rscn/rng.hpp"

namespace rscn {

// Random vector functional-link baselines. No direct input-output links:
// the hidden layer is the only basis, the same as the SCN models.
struct RvflConfig {
  std::size_t l = 100;     // fixed hidden node count
  double lambda = 1.0;     // weights and biases uniform on [−λ, λ]
  std::uint64_t seed = 1;
  bool weighted = false;
  std::size_t ao_rounds = 5;
  WlsRoute wls_route = WlsRoute::NormalEquations;

  void validate() const;
};

/// Draws L nodes (d weights then the bias per node) and solves β by ordinary
/// least squares on the fixed basis.
ScnModel train_rvfl(const Matrix& x, const Matrix& t, const RvflConfig& cfg, Rng& rng);

struct WeightedRvflResult {
  ScnModel model;
  PenaltyWeights weights;
};

/// KDE-weighted ("improved") RVFL: the basis is drawn once exactly as in
/// train_rvfl, then `ao_rounds` rounds alternate a KDE weight update from the
/// current residuals with a weighted least-squares re-solve of β.
WeightedRvflResult train_weighted_rvfl(const Matrix& x, const Matrix& t, const RvflConfig& cfg, Rng& rng);

}  // namespace rscn
