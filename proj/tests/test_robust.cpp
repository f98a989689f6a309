#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rscn/data.hpp"
#include "rscn/error.hpp"
#include "rscn/metrics.hpp"
#include "rscn/robust.hpp"

namespace rscn {
namespace {

const double kK0 = 1.0 / std::sqrt(2.0 * M_PI);

Matrix column(std::initializer_list<double> v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

Dataset linear_dataset(std::size_t n, Rng& rng) {
  Dataset ds;
  ds.x.resize(static_cast<Eigen::Index>(n), 1);
  ds.y.resize(static_cast<Eigen::Index>(n), 1);
  for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
    ds.x(i, 0) = rng.uniform01();
    ds.y(i, 0) = 0.2 + 0.6 * ds.x(i, 0);
  }
  ds.outlier_mask.assign(n, false);
  return ds;
}

TEST(Kernel, Values) {
  EXPECT_NEAR(gaussian_kernel(0.0), 0.3989422804, 1e-10);
  EXPECT_NEAR(gaussian_kernel(1.0), 0.2419707245, 1e-10);
  for (double t : {0.3, 1.7, 5.0}) EXPECT_EQ(gaussian_kernel(t), gaussian_kernel(-t));
}

TEST(Bandwidth, FromSigma) {
  const KdeParams k = bandwidth_from_sigma(0.5, 32);
  EXPECT_NEAR(k.bandwidth, 0.265, 1e-12);
}

TEST(Bandwidth, ZeroSpreadUsesFloor) {
  const std::vector<double> r(6, 0.37);
  const KdeParams k = bandwidth(r);
  EXPECT_EQ(k.sigma_hat, 0.0);
  EXPECT_EQ(k.bandwidth, kBandwidthFloor);
}

TEST(Bandwidth, SampleStandardDeviation) {
  const std::vector<double> r{0.0, 1.0, 2.0};
  const KdeParams k = bandwidth(r);
  EXPECT_NEAR(k.sigma_hat, 1.0, 1e-15);
  EXPECT_NEAR(k.bandwidth, 1.06 * std::pow(3.0, -0.2), 1e-14);
  EXPECT_EQ(k.n, 3u);
}

TEST(PenaltyWeights, SingleSample) {
  const PenaltyWeights w = compute_penalty_weights(column({0.7}));
  EXPECT_NEAR(w.theta[0], kK0 / kBandwidthFloor, 1e-6 * kK0 / kBandwidthFloor);
}

TEST(PenaltyWeights, IdenticalResidualsGiveEqualWeights) {
  const PenaltyWeights w = compute_penalty_weights(column({0.2, 0.2, 0.2, 0.2, 0.2}));
  for (std::size_t i = 1; i < 5; ++i) EXPECT_EQ(w.theta[i], w.theta[0]);
}

TEST(PenaltyWeights, IsolatedResidualIsDownWeighted) {
  const PenaltyWeights w = compute_penalty_weights(column({0, 0, 10}));
  EXPECT_EQ(w.theta[0], w.theta[1]);
  EXPECT_LT(w.theta[2], w.theta[0]);
  // Hand evaluation: σ̂ of {0, 0, 10} is 10/√3.
  const double tau = 1.06 * (10.0 / std::sqrt(3.0)) * std::pow(3.0, -0.2);
  const double near = (2.0 * kK0 + gaussian_kernel(10.0 / tau)) / (3.0 * tau);
  const double far = (kK0 + 2.0 * gaussian_kernel(10.0 / tau)) / (3.0 * tau);
  EXPECT_NEAR(w.theta[0], near, 1e-12 * near);
  EXPECT_NEAR(w.theta[2], far, 1e-12 * far);
}

TEST(PenaltyWeights, UsesVectorDistances) {
  Matrix e(3, 2);
  e << 0, 0, 3, 4, 0, 0;
  const PenaltyWeights w = compute_penalty_weights(e);
  const double tau = w.kde.bandwidth;
  const double expected = (kK0 + gaussian_kernel(5.0 / tau) + kK0) / (3.0 * tau);
  EXPECT_NEAR(w.theta[0], expected, 1e-12 * expected);
}

TEST(PenaltyWeightsProperties, BoundsOnRandomResiduals) {
  Rng rng(123);
  for (int k = 0; k < 100; ++k) {
    const auto n = static_cast<Eigen::Index>(1 + rng.below(80));
    const auto m = static_cast<Eigen::Index>(1 + rng.below(3));
    Matrix e(n, m);
    for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = rng.uniform(-2.0, 2.0) * (k % 4 == 0 ? 1e-3 : 1.0);
    const PenaltyWeights w = compute_penalty_weights(e);
    const double tau = w.kde.bandwidth;
    const double lo = kK0 / (tau * static_cast<double>(n));
    const double hi = kK0 / tau;
    for (std::size_t i = 0; i < w.theta.size(); ++i) {
      EXPECT_GE(w.theta[i], lo * (1 - 1e-12)) << "set " << k;
      EXPECT_LE(w.theta[i], hi * (1 + 1e-12)) << "set " << k;
    }
  }
}

TEST(PenaltyWeightsProperties, PermutationEquivariance) {
  Rng rng(321);
  for (int k = 0; k < 30; ++k) {
    const Eigen::Index n = 50;
    Matrix e(n, 2);
    for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = rng.uniform(-1.0, 1.0);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    Matrix ep(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) ep.row(i) = e.row(perm[static_cast<std::size_t>(i)]);
    const PenaltyWeights a = compute_penalty_weights(e);
    const PenaltyWeights b = compute_penalty_weights(ep);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = a.theta[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
      EXPECT_NEAR(b.theta[static_cast<std::size_t>(i)], x, 1e-12 * x);
    }
  }
}

TEST(PenaltyWeightsProperties, UniformResidualsLeaveLeastSquaresUnchanged) {
  Rng rng(4);
  const Matrix h = Matrix::Random(20, 4);
  const Matrix t = Matrix::Random(20, 1);
  const PenaltyWeights w = compute_penalty_weights(Matrix::Constant(20, 1, 0.3));
  const Matrix a = weighted_least_squares(h, w.theta, t);
  const Matrix b = weighted_least_squares(h, DiagonalWeights::uniform(20), t);
  EXPECT_LT((a - b).norm(), 1e-10 * b.norm());
}

TEST(RscKdeProperties, OutliersAreDownWeightedAfterOneRound) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(5000 + seed);
    const Dataset clean = linear_dataset(200, rng);
    const Dataset noisy = inject_outliers(clean, 0.1, {-0.2, 0.8}, OutlierMode::Replace, rng);
    AoConfig cfg;
    cfg.i_max = 1;
    cfg.inner.l_max = 10;
    cfg.inner.p_max = 30;
    const RscResult r = train_rsc_kde(noisy.x, noisy.y, cfg, rng);
    double out = 0, in = 0;
    std::size_t no = 0, ni = 0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      if (noisy.outlier_mask[i]) {
        out += r.weights.theta[i];
        ++no;
      } else {
        in += r.weights.theta[i];
        ++ni;
      }
    }
    ASSERT_EQ(no, 20u);
    if (out / static_cast<double>(no) < in / static_cast<double>(ni)) ++hits;
  }
  EXPECT_GE(hits, 48);
}

TEST(RscKde, SingleRoundEqualsPlainBuild) {
  Rng data(8);
  auto [train, test] = generate_synthetic(120, 50, data);
  AoConfig cfg;
  cfg.i_max = 1;
  cfg.inner.l_max = 15;
  Rng a(77), b(77);
  const RscResult r = train_rsc_kde(train.x, train.y, cfg, a);
  const BuildResult plain = build_round(train.x, train.y, DiagonalWeights::uniform(120), cfg.inner, b);
  EXPECT_EQ(r.model, plain.model);
  ASSERT_EQ(r.trace.rounds.size(), 1u);
  EXPECT_EQ(r.weights.iteration, 1u);
}

TEST(RscKde, TraceRecordsEveryRound) {
  Rng data(9);
  auto [train, test] = generate_synthetic(150, 50, data);
  const Dataset noisy = inject_outliers(train, 0.2, {-0.2, 0.8}, OutlierMode::Replace, data);
  AoConfig cfg;
  cfg.i_max = 3;
  cfg.inner.l_max = 12;
  Rng rng(1);
  const RscResult r = train_rsc_kde(noisy.x, noisy.y, cfg, rng);
  ASSERT_EQ(r.trace.rounds.size(), 3u);
  ASSERT_EQ(r.trace.builds.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& rec = r.trace.rounds[k];
    EXPECT_EQ(rec.round, k + 1);
    EXPECT_LE(rec.theta_min, rec.theta_mean);
    EXPECT_LE(rec.theta_mean, rec.theta_max);
    EXPECT_GT(rec.bandwidth, 0.0);
    EXPECT_FALSE(rec.validation_rmse);
  }
  EXPECT_FALSE(r.trace.best_round);
}

TEST(RscKde, WarmStartKeepsFirstRoundNodes) {
  Rng data(10);
  auto [train, test] = generate_synthetic(150, 50, data);
  const Dataset noisy = inject_outliers(train, 0.2, {-0.2, 0.8}, OutlierMode::Replace, data);
  AoConfig cfg;
  cfg.i_max = 4;
  cfg.inner.l_max = 12;
  cfg.warm_start = true;
  Rng a(3), b(3);
  const RscResult warm = train_rsc_kde(noisy.x, noisy.y, cfg, a);
  cfg.i_max = 1;
  const RscResult first = train_rsc_kde(noisy.x, noisy.y, cfg, b);
  EXPECT_EQ(warm.trace.builds.size(), 1u);
  EXPECT_EQ(warm.model.nodes, first.model.nodes);
}

TEST(RscKde, ValidationReturnsBestRound) {
  Rng data(11);
  auto [train, test] = generate_synthetic(200, 100, data);
  const Dataset noisy = inject_outliers(train, 0.2, {-0.2, 0.8}, OutlierMode::Replace, data);
  AoConfig cfg;
  cfg.i_max = 5;
  cfg.inner.l_max = 20;
  cfg.validation = ValidationSet{test.x, test.y};
  Rng rng(12);
  const RscResult r = train_rsc_kde(noisy.x, noisy.y, cfg, rng);
  ASSERT_TRUE(r.trace.best_round);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& rec : r.trace.rounds) {
    ASSERT_TRUE(rec.validation_rmse);
    best = std::min(best, *rec.validation_rmse);
  }
  EXPECT_EQ(*r.trace.rounds[*r.trace.best_round - 1].validation_rmse, best);
  EXPECT_NEAR(rmse(forward(r.model, test.x), test.y), best, 1e-12);
}

TEST(RscKde, ContractViolations) {
  Rng rng(1);
  AoConfig cfg;
  EXPECT_THROW(train_rsc_kde(Matrix::Ones(4, 1), Matrix::Ones(3, 1), cfg, rng), ContractViolation);
  EXPECT_THROW(train_rsc_kde(Matrix(0, 1), Matrix(0, 1), cfg, rng), ContractViolation);
  cfg.i_max = 0;
  EXPECT_THROW(train_rsc_kde(Matrix::Ones(4, 1), Matrix::Ones(4, 1), cfg, rng), ContractViolation);
}

}  // namespace
}  // namespace rscn
