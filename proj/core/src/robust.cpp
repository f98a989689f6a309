#include "rscn/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "rscn/error.hpp"
#include "rscn/metrics.hpp"

namespace rscn {

double gaussian_kernel(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); }

KdeParams bandwidth_from_sigma(double sigma_hat, std::size_t n) {
  if (n == 0) throw ContractViolation("bandwidth: no samples");
  KdeParams p;
  p.n = n;
  p.sigma_hat = sigma_hat;
  const double tau = 1.06 * sigma_hat * std::pow(static_cast<double>(n), -0.2);
  p.bandwidth = (tau > kBandwidthFloor) ? tau : kBandwidthFloor;
  return p;
}

KdeParams bandwidth(std::span<const double> residual_norms) {
  const std::size_t n = residual_norms.size();
  if (n == 0) throw ContractViolation("bandwidth: no samples");
  double sigma = 0.0;
  const auto [lo, hi] = std::minmax_element(residual_norms.begin(), residual_norms.end());
  if (n > 1 && *lo != *hi) {  // a rounded mean would invent spread for equal values
    const double mean = std::accumulate(residual_norms.begin(), residual_norms.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : residual_norms) ss += (v - mean) * (v - mean);
    sigma = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return bandwidth_from_sigma(sigma, n);
}

PenaltyWeights PenaltyWeights::initial(std::size_t n) {
  PenaltyWeights w;
  w.theta = DiagonalWeights::uniform(n, 1.0);
  return w;
}

PenaltyWeights compute_penalty_weights(const Matrix& residuals) {
  const auto n = static_cast<std::size_t>(residuals.rows());
  if (n == 0) throw ContractViolation("compute_penalty_weights: no samples");

  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = residuals.row(static_cast<Eigen::Index>(i)).norm();
  PenaltyWeights out;
  out.kde = bandwidth(norms);
  const double tau = out.kde.bandwidth;

  // Sums run over k in index order for every i, so each θ_i depends only on
  // the multiset of residuals and the row it belongs to.
  std::vector<double> theta(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ei = residuals.row(static_cast<Eigen::Index>(i));
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double dist = (ei - residuals.row(static_cast<Eigen::Index>(k))).norm();
      acc += gaussian_kernel(dist / tau);
    }
    theta[i] = acc / (tau * static_cast<double>(n));
  }
  out.theta = DiagonalWeights(std::move(theta));
  return out;
}

void AoConfig::validate() const {
  if (i_max < 1) throw ContractViolation("AoConfig: i_max must be at least 1");
  inner.validate();
  if (validation && validation->x.rows() != validation->t.rows()) {
    throw ContractViolation("AoConfig: validation inputs and targets have different row counts");
  }
}

namespace {

void summarize(const PenaltyWeights& w, AoRoundRecord& rec) {
  const auto e = w.theta.entries();
  rec.theta_min = *std::min_element(e.begin(), e.end());
  rec.theta_max = *std::max_element(e.begin(), e.end());
  rec.theta_mean = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
  rec.bandwidth = w.kde.bandwidth;
}

}  // namespace

RscResult train_rsc_kde(const Matrix& x, const Matrix& t, const AoConfig& cfg, Rng& rng) {
  cfg.validate();
  if (x.rows() != t.rows()) throw ContractViolation("train_rsc_kde: input and target row counts differ");
  if (x.rows() == 0) throw ContractViolation("train_rsc_kde: no training samples");
  const auto n = static_cast<std::size_t>(x.rows());

  const bool use_validation = cfg.validation.has_value() && cfg.stop_on_validation_rise;

  PenaltyWeights weights = PenaltyWeights::initial(n);
  RscResult result;
  result.weights = weights;

  ScnModel model;
  Matrix h;  // hidden outputs of the current model on the training inputs
  double weighted_norm = std::numeric_limits<double>::infinity();

  std::optional<double> best_rmse;
  int rises = 0;
  std::optional<double> last_rmse;

  for (std::size_t round = 1; round <= cfg.i_max; ++round) {
    if (round > 1 && !(weighted_norm > cfg.inner.epsilon)) break;

    AoRoundRecord rec;
    rec.round = round;
    if (cfg.warm_start && round > 1) {
      if (!model.nodes.empty()) model.beta = weighted_least_squares(h, weights.theta, t, 0.0, cfg.inner.wls_route);
      rec.termination = result.trace.rounds.back().termination;
    } else {
      std::optional<NodeValidation> node_val;
      if (cfg.validation && cfg.node_patience > 0) {
        node_val.emplace(NodeValidation{cfg.validation->x, cfg.validation->t, cfg.node_patience});
      }
      BuildResult built = build_round(x, t, weights.theta, cfg.inner, rng, node_val ? &*node_val : nullptr);
      model = std::move(built.model);
      rec.termination = built.trace.termination;
      result.trace.builds.push_back(std::move(built.trace));
      h = hidden_matrix(model.nodes, x, model.activation);
    }
    rec.nodes = model.nodes.size();

    const Matrix residual = model.nodes.empty() ? Matrix(-t) : Matrix(h * model.beta - t);
    weighted_norm = weighted_frobenius_norm(residual, weights.theta);
    rec.weighted_residual_norm = weighted_norm;
    rec.unweighted_residual_norm = residual.norm();

    if (cfg.validation && !model.nodes.empty()) {
      rec.validation_rmse = rmse(forward(model, cfg.validation->x), cfg.validation->t);
    }

    PenaltyWeights updated = compute_penalty_weights(residual);
    updated.iteration = round;
    summarize(updated, rec);
    if (!model.nodes.empty()) {
      const Matrix resolved = weighted_least_squares(h, updated.theta, t, 0.0, cfg.inner.wls_route);
      rec.resolved_unweighted_norm = (h * resolved - t).norm();
    } else {
      rec.resolved_unweighted_norm = residual.norm();
    }
    result.trace.rounds.push_back(rec);

    bool stop = false;
    if (use_validation && rec.validation_rmse) {
      const double v = *rec.validation_rmse;
      if (!best_rmse || v < *best_rmse) {
        best_rmse = v;
        result.trace.best_round = round;
        result.model = model;
        result.weights = updated;
      }
      rises = (last_rmse && v > *last_rmse) ? rises + 1 : 0;
      last_rmse = v;
      if (rises >= kValidationPatience) {
        result.trace.stopped_on_validation = true;
        stop = true;
      }
    }
    weights = std::move(updated);
    if (stop) break;
  }

  if (!result.trace.best_round) {
    result.model = std::move(model);
    result.weights = std::move(weights);
  }
  return result;
}

}  // namespace rscn
