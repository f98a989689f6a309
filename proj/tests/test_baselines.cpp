#include <gtest/gtest.h>

#include <cmath>

#include "rscn/baselines.hpp"
#include "rscn/data.hpp"
#include "rscn/error.hpp"

namespace rscn {
namespace {

Matrix grid(Eigen::Index n) {
  Matrix x(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) x(i, 0) = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

TEST(Rvfl, SingleNodeMatchesNormalEquations) {
  const Matrix x = grid(30);
  const Matrix t = Matrix::Constant(30, 1, 0.5);
  RvflConfig cfg;
  cfg.l = 1;
  cfg.lambda = 3.0;
  Rng rng(5);
  const ScnModel m = train_rvfl(x, t, cfg, rng);
  ASSERT_EQ(m.nodes.size(), 1u);
  const Vector h = node_output(m.nodes[0], x);
  const double beta = h.dot(t.col(0)) / h.squaredNorm();
  const double oracle = (beta * h - t.col(0)).norm();
  EXPECT_NEAR((forward(m, x) - t).norm(), oracle, 1e-12);
}

TEST(Rvfl, SameSeedSameModel) {
  const Matrix x = grid(40);
  const Matrix t = x.array().sin();
  RvflConfig cfg;
  cfg.l = 20;
  Rng a(1), b(1);
  EXPECT_EQ(train_rvfl(x, t, cfg, a), train_rvfl(x, t, cfg, b));
}

TEST(Rvfl, OverparameterisedInterpolates) {
  const Matrix x = grid(20);
  const Matrix t = (2.0 * x).array().sin() + 0.3 * x.array().square();
  RvflConfig cfg;
  cfg.l = 40;
  cfg.lambda = 10.0;
  // The explicit Gram matrix squares the conditioning; interpolation to 1e-6
  // needs the orthogonal route.
  cfg.wls_route = WlsRoute::ScaledOrthogonal;
  Rng rng(2);
  const ScnModel m = train_rvfl(x, t, cfg, rng);
  EXPECT_LE((forward(m, x) - t).norm(), 1e-6);
}

TEST(Rvfl, DrawsWeightsThenBias) {
  RvflConfig cfg;
  cfg.l = 3;
  cfg.lambda = 2.0;
  Rng rng(42), ref(42);
  const ScnModel m = train_rvfl(Matrix::Random(10, 2), Matrix::Random(10, 1), cfg, rng);
  for (const auto& node : m.nodes) {
    EXPECT_EQ(node.w[0], ref.uniform(-2.0, 2.0));
    EXPECT_EQ(node.w[1], ref.uniform(-2.0, 2.0));
    EXPECT_EQ(node.b, ref.uniform(-2.0, 2.0));
  }
}

TEST(WeightedRvfl, ZeroRoundsIsPlainRvfl) {
  const Matrix x = grid(50);
  const Matrix t = x.array().cos();
  RvflConfig cfg;
  cfg.l = 15;
  cfg.ao_rounds = 0;
  cfg.weighted = true;
  Rng a(7), b(7);
  EXPECT_EQ(train_weighted_rvfl(x, t, cfg, a).model, train_rvfl(x, t, cfg, b));
}

TEST(WeightedRvfl, UniformResidualsAreAFixedPoint) {
  // Interpolation leaves residuals at rounding level: the KDE width hits its
  // floor, all weights agree and the re-solve reproduces the same β.
  const Matrix x = grid(12);
  const Matrix t = x.array().exp();
  RvflConfig cfg;
  cfg.l = 30;
  cfg.lambda = 5.0;
  cfg.ao_rounds = 1;
  Rng a(3), b(3);
  const WeightedRvflResult w = train_weighted_rvfl(x, t, cfg, a);
  const ScnModel plain = train_rvfl(x, t, cfg, b);
  EXPECT_LT((forward(w.model, x) - forward(plain, x)).norm(), 1e-6);
}

TEST(WeightedRvfl, OutliersAreDownWeightedAfterOneRound) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(9000 + seed);
    Dataset ds;
    ds.x.resize(200, 1);
    ds.y.resize(200, 1);
    for (Eigen::Index i = 0; i < 200; ++i) {
      ds.x(i, 0) = rng.uniform01();
      ds.y(i, 0) = 0.2 + 0.6 * ds.x(i, 0);
    }
    ds.outlier_mask.assign(200, false);
    const Dataset noisy = inject_outliers(ds, 0.1, {-0.2, 0.8}, OutlierMode::Replace, rng);
    RvflConfig cfg;
    cfg.l = 20;
    cfg.lambda = 1.0;
    cfg.ao_rounds = 1;
    cfg.weighted = true;
    const WeightedRvflResult r = train_weighted_rvfl(noisy.x, noisy.y, cfg, rng);
    double out = 0, in = 0;
    for (std::size_t i = 0; i < 200; ++i) (noisy.outlier_mask[i] ? out : in) += r.weights.theta[i];
    if (out / 20.0 < in / 180.0) ++hits;
  }
  EXPECT_GE(hits, 48);
}

TEST(RvflConfig, Validation) {
  RvflConfig c;
  EXPECT_NO_THROW(c.validate());
  c.l = 0;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = RvflConfig{};
  c.lambda = 0.0;
  EXPECT_THROW(c.validate(), ContractViolation);
}

}  // namespace
}  // namespace rscn
