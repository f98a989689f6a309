#include <benchmark/benchmark.h>

#include "rscn/configurator.hpp"
#include "rscn/data.hpp"
#include "rscn/robust.hpp"

namespace {

rscn::Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  rscn::Rng rng(seed);
  rscn::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
  return m;
}

void BM_Pinv(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const rscn::Matrix m = random_matrix(n, n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(rscn::pinv(m));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Pinv)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_WeightedLeastSquares(benchmark::State& state) {
  const auto l = static_cast<Eigen::Index>(state.range(0));
  const auto route = state.range(1) == 0 ? rscn::WlsRoute::NormalEquations : rscn::WlsRoute::ScaledOrthogonal;
  const rscn::Matrix h = random_matrix(600, l, 3);
  const rscn::Matrix t = random_matrix(600, 1, 4);
  const auto w = rscn::DiagonalWeights::uniform(600, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(rscn::weighted_least_squares(h, w, t, 0.0, route));
}
BENCHMARK(BM_WeightedLeastSquares)->ArgsProduct({{10, 50, 100}, {0, 1}});

void BM_PenaltyWeights(benchmark::State& state) {
  const rscn::Matrix e = random_matrix(state.range(0), 1, 11);
  for (auto _ : state) benchmark::DoNotOptimize(rscn::compute_penalty_weights(e));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PenaltyWeights)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

void BM_BuildRoundSynthetic(benchmark::State& state) {
  rscn::Rng data_rng(5);
  auto [train, test] = rscn::generate_synthetic(600, 600, data_rng);
  train = rscn::normalize_with(train, {rscn::kSyntheticDomain}, {rscn::ColumnRange{0.0, 1.0}});
  rscn::ScnConfig cfg;
  cfg.l_max = static_cast<std::size_t>(state.range(0));
  const auto w = rscn::DiagonalWeights::uniform(train.size());
  for (auto _ : state) {
    rscn::Rng rng(9);
    benchmark::DoNotOptimize(rscn::build_round(train.x, train.y, w, cfg, rng));
  }
}
BENCHMARK(BM_BuildRoundSynthetic)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
