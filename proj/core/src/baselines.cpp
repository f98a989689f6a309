#include "rscn/baselines.hpp"

#include <cmath>

#include "rscn/error.hpp"

namespace rscn {

void RvflConfig::validate() const {
  if (l < 1) throw ContractViolation("RvflConfig: l must be at least 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ContractViolation("RvflConfig: lambda must be positive");
}

namespace {

struct Basis {
  std::vector<HiddenNode> nodes;
  Matrix h;
};

Basis draw_basis(const Matrix& x, const Matrix& t, const RvflConfig& cfg, Rng& rng) {
  cfg.validate();
  if (x.rows() != t.rows()) throw ContractViolation("rvfl: input and target row counts differ");
  if (x.rows() == 0) throw ContractViolation("rvfl: no training samples");
  const auto d = static_cast<std::size_t>(x.cols());
  Basis basis;
  basis.nodes.reserve(cfg.l);
  for (std::size_t j = 0; j < cfg.l; ++j) {
    HiddenNode node;
    node.w.resize(d);
    for (auto& v : node.w) v = rng.uniform(-cfg.lambda, cfg.lambda);
    node.b = rng.uniform(-cfg.lambda, cfg.lambda);
    basis.nodes.push_back(std::move(node));
  }
  basis.h = hidden_matrix(basis.nodes, x);
  return basis;
}

ScnModel make_model(Basis&& basis, Matrix beta, const Matrix& x, const Matrix& t) {
  ScnModel m;
  m.nodes = std::move(basis.nodes);
  m.beta = std::move(beta);
  m.input_dim = static_cast<std::size_t>(x.cols());
  m.output_dim = static_cast<std::size_t>(t.cols());
  return m;
}

}  // namespace

ScnModel train_rvfl(const Matrix& x, const Matrix& t, const RvflConfig& cfg, Rng& rng) {
  Basis basis = draw_basis(x, t, cfg, rng);
  Matrix beta = weighted_least_squares(basis.h, DiagonalWeights::uniform(static_cast<std::size_t>(x.rows())), t, 0.0,
                                       cfg.wls_route);
  return make_model(std::move(basis), std::move(beta), x, t);
}

WeightedRvflResult train_weighted_rvfl(const Matrix& x, const Matrix& t, const RvflConfig& cfg, Rng& rng) {
  Basis basis = draw_basis(x, t, cfg, rng);
  PenaltyWeights weights = PenaltyWeights::initial(static_cast<std::size_t>(x.rows()));
  Matrix beta = weighted_least_squares(basis.h, weights.theta, t, 0.0, cfg.wls_route);
  for (std::size_t round = 1; round <= cfg.ao_rounds; ++round) {
    weights = compute_penalty_weights(basis.h * beta - t);
    weights.iteration = round;
    beta = weighted_least_squares(basis.h, weights.theta, t, 0.0, cfg.wls_route);
  }
  WeightedRvflResult out;
  out.model = make_model(std::move(basis), std::move(beta), x, t);
  out.weights = std::move(weights);
  return out;
}

}  // namespace rscn
