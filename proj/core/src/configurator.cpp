#include "rscn/configurator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rscn/error.hpp"

namespace rscn {

std::vector<double> default_scopes() { return {0.5, 1, 5, 10, 30, 50, 100, 150, 200}; }

void ScnConfig::validate() const {
  if (l_max < 1) throw ContractViolation("ScnConfig: l_max must be at least 1");
  if (p_max < 1) throw ContractViolation("ScnConfig: p_max must be at least 1");
  if (!(epsilon >= 0.0)) throw ContractViolation("ScnConfig: epsilon must be non-negative");
  if (!(r0 > 0.0 && r0 < 1.0)) throw ContractViolation("ScnConfig: r0 must lie in (0, 1)");
  if (scopes.empty()) throw ContractViolation("ScnConfig: scope set is empty");
  for (std::size_t i = 0; i < scopes.size(); ++i) {
    if (!(scopes[i] > 0.0) || !std::isfinite(scopes[i])) {
      throw ContractViolation("ScnConfig: scopes must be finite and strictly positive");
    }
    if (i > 0 && !(scopes[i] > scopes[i - 1])) throw ContractViolation("ScnConfig: scopes must be ascending");
  }
}

double CandidateScore::min_xi() const {
  return xi_per_output.empty() ? 0.0 : *std::min_element(xi_per_output.begin(), xi_per_output.end());
}

namespace {

// ξ̃_{L,q} from the inner products ẽ_qᵀh̃ (eh), h̃ᵀh̃ (hh) and ẽ_qᵀẽ_q (ee).
template <typename EhVec, typename EeVec>
CandidateScore score_from_products(const EhVec& eh, double hh, const EeVec& ee, double slack) {
  CandidateScore score;
  score.xi_per_output.reserve(static_cast<std::size_t>(eh.size()));
  for (Eigen::Index q = 0; q < eh.size(); ++q) {
    const double xi = eh(q) * eh(q) / hh - slack * ee(q);
    score.xi_per_output.push_back(xi);
    score.xi_total += xi;
  }
  return score;
}

}  // namespace

std::optional<CandidateScore> candidate_score(const Matrix& e_weighted, const Vector& h_weighted, double r,
                                              double mu_l) {
  if (e_weighted.rows() != h_weighted.size()) {
    throw ContractViolation("candidate_score: residual and node output lengths differ");
  }
  const double hh = h_weighted.squaredNorm();
  if (!(hh > 0.0)) return std::nullopt;
  const Vector eh = e_weighted.transpose() * h_weighted;
  const Vector ee = e_weighted.colwise().squaredNorm().transpose();
  return score_from_products(eh, hh, ee, 1.0 - r - mu_l);
}

std::optional<ConfiguredNode> try_configure_node(const Matrix& e_weighted, const Matrix& x, const Vector& sqrt_weights,
                                                 const ScnConfig& cfg, double r, double mu_l, Rng& rng,
                                                 std::size_t* drawn) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (e_weighted.rows() != n || sqrt_weights.size() != n) {
    throw ContractViolation("try_configure_node: sample counts of inputs, residual and weights differ");
  }
  const auto p = static_cast<Eigen::Index>(cfg.p_max);
  std::size_t count = 0;

  const Vector ee = e_weighted.colwise().squaredNorm().transpose();
  const double slack = 1.0 - r - mu_l;

  Eigen::MatrixXd w(d, p);
  Vector b(p);
  for (double lambda : cfg.scopes) {
    for (Eigen::Index k = 0; k < p; ++k) {
      for (Eigen::Index j = 0; j < d; ++j) w(j, k) = rng.uniform(-lambda, lambda);
      b(k) = rng.uniform(-lambda, lambda);
    }
    count += cfg.p_max;

    Eigen::MatrixXd h = x * w;
    h.rowwise() += b.transpose();
    activate_inplace(ActivationKind::Sigmoid, h);
    h = sqrt_weights.asDiagonal() * h;

    const Eigen::MatrixXd eh = e_weighted.transpose() * h;  // m x P
    const Eigen::RowVectorXd hh = h.colwise().squaredNorm();

    Eigen::Index best = -1;
    CandidateScore best_score;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (!(hh(k) > 0.0)) continue;  // degenerate candidate
      CandidateScore score = score_from_products(eh.col(k), hh(k), ee, slack);
      if (!score.admissible()) continue;
      if (best < 0 || score.xi_total > best_score.xi_total) {
        best = k;
        best_score = std::move(score);
      }
    }
    if (best >= 0) {
      if (drawn) *drawn = count;
      ConfiguredNode out;
      out.node.w.assign(w.col(best).data(), w.col(best).data() + d);
      out.node.b = b(best);
      out.score = std::move(best_score);
      out.lambda = lambda;
      out.candidates_drawn = count;
      return out;
    }
  }
  if (drawn) *drawn = count;
  return std::nullopt;
}

std::string to_string(BuildTermination t) {
  switch (t) {
    case BuildTermination::EpsilonReached:
      return "epsilon_reached";
    case BuildTermination::MaxNodesReached:
      return "l_max_reached";
    case BuildTermination::ValidationStalled:
      return "validation_stalled";
    case BuildTermination::RelaxationExhausted:
      return "relaxation_exhausted";
  }
  return "unknown";
}

BuildResult build_round(const Matrix& x, const Matrix& t, const DiagonalWeights& weights, const ScnConfig& cfg,
                        Rng& rng, const NodeValidation* validation) {
  cfg.validate();
  const Eigen::Index n = x.rows();
  if (n == 0) throw ContractViolation("build_round: no training samples");
  if (t.rows() != n) throw ContractViolation("build_round: input and target row counts differ");
  if (static_cast<Eigen::Index>(weights.size()) != n) throw ContractViolation("build_round: weight count differs from N");
  if (t.cols() == 0) throw ContractViolation("build_round: target has no columns");
  if (validation) {
    if (validation->x.cols() != x.cols() || validation->t.cols() != t.cols() ||
        validation->x.rows() != validation->t.rows()) {
      throw ContractViolation("build_round: validation data does not match the training shapes");
    }
    if (validation->patience == 0) throw ContractViolation("build_round: validation patience must be positive");
  }

  const Vector sqrt_w = weights.sqrt_view();

  BuildResult out;
  out.model.input_dim = static_cast<std::size_t>(x.cols());
  out.model.output_dim = static_cast<std::size_t>(t.cols());
  out.model.beta = Matrix(0, t.cols());

  Matrix e = -t;  // H_0 β − T with no hidden nodes
  Matrix e_weighted = sqrt_w.asDiagonal() * e;
  double norm = e_weighted.norm();
  out.trace.initial_weighted_norm = norm;

  Eigen::MatrixXd h(n, 0);
  Eigen::MatrixXd h_val(validation ? validation->x.rows() : 0, 0);
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t best_len = 0;
  Matrix best_beta = out.model.beta;
  while (true) {
    if (!(norm > cfg.epsilon)) {
      out.trace.termination = BuildTermination::EpsilonReached;
      break;
    }
    if (out.model.nodes.size() >= cfg.l_max) {
      out.trace.termination = BuildTermination::MaxNodesReached;
      break;
    }

    const double next_l = static_cast<double>(out.model.nodes.size() + 1);
    double r = cfg.r0;
    NodeRecord rec;
    std::optional<ConfiguredNode> found;
    while (true) {
      const double mu = (1.0 - r) / (next_l + 1.0);
      std::size_t drawn = 0;
      found = try_configure_node(e_weighted, x, sqrt_w, cfg, r, mu, rng, &drawn);
      rec.attempts += drawn;
      if (found) {
        rec.r = r;
        rec.mu = mu;
        break;
      }
      if (1.0 - r < kRelaxationCeilingGap) break;
      r += (1.0 - r) * rng.uniform_open01();
      ++rec.relaxations;
    }
    if (!found) {
      out.trace.termination = BuildTermination::RelaxationExhausted;
      break;
    }

    h.conservativeResize(Eigen::NoChange, h.cols() + 1);
    h.col(h.cols() - 1) = node_output(found->node, x);
    out.model.nodes.push_back(std::move(found->node));
    Matrix beta = weighted_least_squares(h, weights, t, 0.0, cfg.wls_route);
    Matrix e_next = h * beta - t;
    Matrix ew_next = sqrt_w.asDiagonal() * e_next;
    if (ew_next.norm() > norm) {
      // Rounding in a near-singular solve can land above the previous optimum.
      // The previous β with a zero weight on the new node is still feasible.
      beta = Matrix::Zero(h.cols(), t.cols());
      beta.topRows(h.cols() - 1) = out.model.beta;
      e_next = e;
      ew_next = e_weighted;
    }
    out.model.beta = std::move(beta);
    e = std::move(e_next);
    e_weighted = std::move(ew_next);
    norm = e_weighted.norm();

    rec.lambda = found->lambda;
    rec.xi_total = found->score.xi_total;
    rec.xi_min = found->score.min_xi();
    rec.weighted_residual_norm = norm;
    rec.unweighted_residual_norm = e.norm();

    bool stalled = false;
    if (validation && h_val.rows() > 0) {
      h_val.conservativeResize(Eigen::NoChange, h_val.cols() + 1);
      h_val.col(h_val.cols() - 1) = node_output(out.model.nodes.back(), validation->x);
      const double v = std::sqrt((h_val * out.model.beta - validation->t).squaredNorm() /
                                 static_cast<double>(validation->t.size()));
      rec.validation_rmse = v;
      if (v < best_val) {
        best_val = v;
        best_len = out.model.nodes.size();
        best_beta = out.model.beta;
      }
      stalled = out.model.nodes.size() - best_len >= validation->patience;
    }
    out.trace.nodes.push_back(rec);
    if (stalled) {
      out.trace.termination = BuildTermination::ValidationStalled;
      break;
    }
  }

  // Cut back to the best-validation prefix. β for a prefix is exactly the
  // solve made when its last node was accepted.
  if (validation && h_val.rows() > 0 && best_len < out.model.nodes.size()) {
    out.model.nodes.resize(best_len);
    out.model.beta = best_beta;
    e = best_len == 0 ? Matrix(-t) : Matrix(h.leftCols(static_cast<Eigen::Index>(best_len)) * best_beta - t);
  }
  out.trace.kept_nodes = out.model.nodes.size();
  out.residual = std::move(e);
  return out;
}

}  // namespace rscn
