#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rscn/configurator.hpp"
#include "rscn/model.hpp"
#include "rscn/numerics.hpp"
#include "rscn/rng.hpp"

namespace rscn {

/// Gaussian kernel K(t) = exp(−t²/2) / √(2π).
double gaussian_kernel(double t);

/// Smallest bandwidth ever used; applied when the rule-of-thumb width collapses.
inline constexpr double kBandwidthFloor = 1e-8;

struct KdeParams {
  double bandwidth = kBandwidthFloor;  // τ
  double sigma_hat = 0.0;              // σ̂
  std::size_t n = 0;
};

/// Rule-of-thumb bandwidth τ = 1.06 σ̂ N^(−1/5), with σ̂ the sample standard
/// deviation (divisor N − 1) of the given residual magnitudes. N = 1 gives
/// σ̂ = 0. τ is floored at kBandwidthFloor.
KdeParams bandwidth(std::span<const double> residual_norms);

/// Same rule from a known σ̂.
KdeParams bandwidth_from_sigma(double sigma_hat, std::size_t n);

/// Per-sample penalty weights θ_i with the AO round that produced them.
struct PenaltyWeights {
  DiagonalWeights theta;
  std::size_t iteration = 0;  // ν; 0 means the initial all-ones weights
  KdeParams kde;

  static PenaltyWeights initial(std::size_t n);
};

/// θ_i = (1/(τN)) Σ_k K(‖e_i − e_k‖ / τ) over the rows of an N x m residual
/// matrix. The bandwidth comes from `bandwidth()` applied to the row norms.
PenaltyWeights compute_penalty_weights(const Matrix& residuals);

struct ValidationSet {
  Matrix x;
  Matrix t;
};

struct AoConfig {
  std::size_t i_max = 5;
  ScnConfig inner;
  std::optional<ValidationSet> validation;
  bool stop_on_validation_rise = true;
  /// Keep the first round's nodes and only re-solve β with updated weights.
  bool warm_start = false;
  /// With a validation set, stop each build after this many nodes without a
  /// validation improvement and keep the best prefix. 0 disables.
  std::size_t node_patience = 0;

  void validate() const;
};

/// Consecutive validation-RMSE increases that stop the AO loop.
inline constexpr int kValidationPatience = 2;

struct AoRoundRecord {
  std::size_t round = 0;  // ν, 1-based
  std::size_t nodes = 0;
  BuildTermination termination = BuildTermination::MaxNodesReached;
  double weighted_residual_norm = 0.0;    // of the returned-by-this-round β
  double unweighted_residual_norm = 0.0;
  std::optional<double> validation_rmse;
  // weights produced at the end of the round
  double theta_min = 0.0;
  double theta_max = 0.0;
  double theta_mean = 0.0;
  double bandwidth = 0.0;
  /// ‖H(β_new) − T‖_F after re-solving β with the new weights.
  double resolved_unweighted_norm = 0.0;
};

struct AoTrace {
  std::vector<AoRoundRecord> rounds;
  std::vector<BuildTrace> builds;
  std::optional<std::size_t> best_round;  // 1-based, set when validation is used
  bool stopped_on_validation = false;
};

struct RscResult {
  ScnModel model;
  PenaltyWeights weights;
  AoTrace trace;
};

/// Robust SCN training by alternating optimisation.
///
/// Starts from θ = 1 and alternates a weighted construction round with a KDE
/// update of θ computed from the unweighted training residuals. The loop runs
/// while ν ≤ i_max and the weighted residual norm exceeds ε. With a validation
/// set and `stop_on_validation_rise`, it stops after kValidationPatience
/// consecutive increases of validation RMSE and returns the best-validation
/// model. The returned weights are the last ones computed.
RscResult train_rsc_kde(const Matrix& x, const Matrix& t, const AoConfig& cfg, Rng& rng);

}  // namespace rscn
