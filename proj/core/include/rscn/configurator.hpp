#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rscn/model.hpp"
#include "rscn/numerics.hpp"
#include "rscn/rng.hpp"

namespace rscn {

/// Scope ladder used when none is configured: spans every scope the
/// reference experiments exercise.
std::vector<double> default_scopes();

struct ScnConfig {
  std::size_t l_max = 100;      // maximum hidden nodes
  double epsilon = 0.0;         // tolerance on the weighted residual Frobenius norm
  std::size_t p_max = 100;      // candidates drawn per scope level
  std::vector<double> scopes = default_scopes();  // ascending, strictly positive
  double r0 = 0.9;              // initial contraction parameter, 0 < r0 < 1
  std::uint64_t seed = 1;
  WlsRoute wls_route = WlsRoute::ScaledOrthogonal;

  /// Throws ContractViolation when an invariant is broken.
  void validate() const;
};

/// 1 − r below this stops the r relaxation and ends the round.
inline constexpr double kRelaxationCeilingGap = 1e-6;

struct CandidateScore {
  std::vector<double> xi_per_output;
  double xi_total = 0.0;

  double min_xi() const;
  /// min_q ξ̃_{L,q} ≥ 0.
  bool admissible() const { return min_xi() >= 0.0; }
};

/// Weighted configuration score of one candidate node.
///
/// `e_weighted` is Θe_{L−1} (N x m) and `h_weighted` is Θh_L (length N).
/// For every output q:
///   ξ̃_{L,q} = (ẽ_qᵀ h̃)² / (h̃ᵀ h̃) − (1 − r − μ_L) ẽ_qᵀ ẽ_q
/// Returns std::nullopt when h̃ is identically zero (a degenerate candidate,
/// to be treated as rejected).
std::optional<CandidateScore> candidate_score(const Matrix& e_weighted, const Vector& h_weighted, double r,
                                              double mu_l);

struct ConfiguredNode {
  HiddenNode node;
  CandidateScore score;
  double lambda = 0.0;
  std::size_t candidates_drawn = 0;
};

/// One pass over the scope ladder. For each λ in order, p_max candidates are
/// drawn uniformly from [−λ, λ]^d × [−λ, λ] (d weights then the bias, per
/// candidate). The first λ with at least one admissible candidate returns the
/// admissible candidate with the largest ξ̃_L. Returns std::nullopt when no
/// scope level produced one. `sqrt_weights` is the diagonal of Θ.
/// `candidates_drawn` in the result counts every draw made in this pass.
std::optional<ConfiguredNode> try_configure_node(const Matrix& e_weighted, const Matrix& x, const Vector& sqrt_weights,
                                                 const ScnConfig& cfg, double r, double mu_l, Rng& rng,
                                                 std::size_t* drawn = nullptr);

enum class BuildTermination { EpsilonReached, MaxNodesReached, RelaxationExhausted, ValidationStalled };

std::string to_string(BuildTermination t);

struct NodeRecord {
  double lambda = 0.0;
  std::size_t attempts = 0;        // candidates drawn, including failed passes
  std::size_t relaxations = 0;     // number of r increments before acceptance
  double r = 0.0;                  // r at acceptance
  double mu = 0.0;                 // μ_L at acceptance
  double xi_total = 0.0;
  double xi_min = 0.0;
  double weighted_residual_norm = 0.0;    // ‖Θ(H_Lβ* − T)‖_F after the solve
  double unweighted_residual_norm = 0.0;  // ‖H_Lβ* − T‖_F
  std::optional<double> validation_rmse;
};

struct BuildTrace {
  double initial_weighted_norm = 0.0;
  std::vector<NodeRecord> nodes;  // every accepted node, including any cut by validation
  std::size_t kept_nodes = 0;
  BuildTermination termination = BuildTermination::MaxNodesReached;

  double final_weighted_norm() const {
    return kept_nodes == 0 ? initial_weighted_norm : nodes[kept_nodes - 1].weighted_residual_norm;
  }
};

struct BuildResult {
  ScnModel model;
  BuildTrace trace;
  Matrix residual;  // unweighted H_Lβ* − T on the training inputs
};

/// Clean held-out data that decides how many nodes a round keeps. Growth stops
/// once `patience` consecutive nodes fail to lower the validation RMSE, and
/// the round is cut back to the prefix with the lowest validation RMSE.
struct NodeValidation {
  const Matrix& x;
  const Matrix& t;
  std::size_t patience = 10;
};

/// One inner construction round: grows nodes one at a time under the
/// weighted supervisory constraint, re-solving β over all nodes with
/// Λ = diag(weights) after every acceptance. Stops when the weighted residual
/// norm is at most ε, when l_max nodes exist, or when r relaxation exhausts.
/// Throws ContractViolation when N = 0 or shapes disagree.
BuildResult build_round(const Matrix& x, const Matrix& t, const DiagonalWeights& weights, const ScnConfig& cfg,
                        Rng& rng, const NodeValidation* validation = nullptr);

}  // namespace rscn
