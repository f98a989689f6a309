#include "rscn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "rscn/baselines.hpp"
#include "rscn/error.hpp"
#include "rscn/robust.hpp"

namespace rscn {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::RscKde:
      return "rsc_kde";
    case Algorithm::ScnPlain:
      return "scn_plain";
    case Algorithm::Rvfl:
      return "rvfl";
    case Algorithm::WeightedRvfl:
      return "weighted_rvfl";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& s) {
  for (auto a : {Algorithm::RscKde, Algorithm::ScnPlain, Algorithm::Rvfl, Algorithm::WeightedRvfl}) {
    if (to_string(a) == s) return a;
  }
  throw ContractViolation("unknown algorithm '" + s + "'");
}

std::string to_string(SourceKind k) {
  switch (k) {
    case SourceKind::Synthetic:
      return "synthetic";
    case SourceKind::SmoothProcess:
      return "smooth_process";
    case SourceKind::Csv:
      return "csv";
  }
  return "unknown";
}

namespace {

bool uses_fixed_basis(Algorithm a) { return a == Algorithm::Rvfl || a == Algorithm::WeightedRvfl; }

std::string join_doubles(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void ExperimentSpec::validate() const {
  if (trials < 1) throw ContractViolation("experiment: trials must be at least 1");
  if (algorithms.empty()) throw ContractViolation("experiment: no algorithms selected");
  if (zeta_grid.empty()) throw ContractViolation("experiment: zeta grid is empty");
  for (double z : zeta_grid) {
    if (!(z >= 0.0 && z <= 1.0)) throw ContractViolation("experiment: zeta values must lie in [0, 1]");
  }
  const bool baselines = std::any_of(algorithms.begin(), algorithms.end(), uses_fixed_basis);
  if (baselines && (lambda_grid.empty() || l_grid.empty())) {
    throw ContractViolation("experiment: baselines need non-empty lambda and L grids");
  }
  if (i_max < 1) throw ContractViolation("experiment: i_max must be at least 1");
  if (!(noise_range.first < noise_range.second)) throw ContractViolation("experiment: noise range must satisfy low < high");
  if (use_validation && !(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ContractViolation("experiment: validation fraction must lie in (0, 1)");
  }
  if (source.kind != SourceKind::Synthetic && !(source.train_fraction > 0.0 && source.train_fraction < 1.0)) {
    throw ContractViolation("experiment: train fraction must lie in (0, 1)");
  }
  if (source.kind == SourceKind::Csv && source.csv_path.empty()) throw ContractViolation("experiment: no CSV path");
  scn.validate();
}

std::map<std::string, std::string> ExperimentSpec::echo() const {
  std::map<std::string, std::string> e;
  e["source"] = to_string(source.kind);
  if (source.kind == SourceKind::Synthetic) {
    e["n_train"] = std::to_string(source.n_train);
    e["n_test"] = std::to_string(source.n_test);
  } else if (source.kind == SourceKind::SmoothProcess) {
    e["n_samples"] = std::to_string(source.n_samples);
  } else {
    e["csv_path"] = source.csv_path;
  }
  if (source.kind != SourceKind::Synthetic) e["train_fraction"] = fmt(source.train_fraction);
  std::vector<std::string> names;
  for (auto a : algorithms) names.push_back(to_string(a));
  e["algorithms"] = join(names);
  e["zeta_grid"] = join_doubles(zeta_grid);
  e["lambda_grid"] = join_doubles(lambda_grid);
  e["l_grid"] = join(l_grid);
  e["trials"] = std::to_string(trials);
  e["seed_base"] = std::to_string(seed_base);
  e["l_max"] = std::to_string(scn.l_max);
  e["epsilon"] = fmt(scn.epsilon);
  e["p_max"] = std::to_string(scn.p_max);
  e["scopes"] = join_doubles(scn.scopes);
  e["r0"] = fmt(scn.r0);
  e["i_max"] = std::to_string(i_max);
  e["warm_start"] = warm_start ? "true" : "false";
  e["validation"] = use_validation ? fmt(validation_fraction) : "off";
  e["node_patience"] = std::to_string(node_patience);
  e["wls_route"] = scn.wls_route == WlsRoute::NormalEquations ? "normal_equations" : "scaled_orthogonal";
  e["rvfl_wls_route"] = rvfl_wls_route == WlsRoute::NormalEquations ? "normal_equations" : "scaled_orthogonal";
  e["outlier_mode"] = to_string(outlier_mode);
  e["noise_range"] = fmt(noise_range.first) + "," + fmt(noise_range.second);
  return e;
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

std::uint64_t data_seed(std::uint64_t seed_base, double zeta, std::size_t trial) {
  std::uint64_t h = mix64(seed_base);
  h = mix64(h ^ std::bit_cast<std::uint64_t>(zeta));
  return mix64(h ^ static_cast<std::uint64_t>(trial));
}

std::uint64_t model_seed(std::uint64_t seed_base, Algorithm a, double zeta, std::optional<double> lambda,
                         std::size_t l, std::size_t trial) {
  std::uint64_t h = data_seed(seed_base, zeta, trial);
  h = mix64(h ^ (0xa1u + static_cast<std::uint64_t>(a)));
  h = mix64(h ^ std::bit_cast<std::uint64_t>(lambda.value_or(0.0)));
  return mix64(h ^ static_cast<std::uint64_t>(l));
}

std::optional<Dataset> load_source(const DataSourceSpec& source) {
  if (source.kind != SourceKind::Csv) return std::nullopt;
  return normalize(load_csv(source.csv_path, source.csv_schema));
}

TrialData make_trial_data(const ExperimentSpec& spec, const Dataset* csv_data, double zeta, std::size_t trial) {
  Rng rng(data_seed(spec.seed_base, zeta, trial));
  Dataset clean_train;
  TrialData out;
  switch (spec.source.kind) {
    case SourceKind::Synthetic: {
      // Kept on the native [−1, 1] domain; the target already lies in [0, 1].
      auto [train, test] = generate_synthetic(spec.source.n_train, spec.source.n_test, rng);
      clean_train = std::move(train);
      out.test = std::move(test);
      break;
    }
    case SourceKind::SmoothProcess: {
      auto [train, test] = split(normalize(generate_smooth_process(spec.source.n_samples, rng)),
                                 spec.source.train_fraction, rng);
      clean_train = std::move(train);
      out.test = std::move(test);
      break;
    }
    case SourceKind::Csv: {
      if (csv_data == nullptr) throw ContractViolation("make_trial_data: CSV source not loaded");
      auto [train, test] = split(*csv_data, spec.source.train_fraction, rng);
      clean_train = std::move(train);
      out.test = std::move(test);
      break;
    }
  }
  if (spec.use_validation && clean_train.size() >= 2) {
    auto [fit, val] = split(clean_train, 1.0 - spec.validation_fraction, rng);
    clean_train = std::move(fit);
    out.validation = std::move(val);
  }
  out.train = inject_outliers(clean_train, zeta, spec.noise_range, spec.outlier_mode, rng);
  return out;
}

namespace {

struct CellDef {
  Algorithm algorithm;
  double zeta;
  std::optional<double> lambda;
  std::size_t l;
};

struct TrialOutcome {
  std::uint64_t seed = 0;
  double rmse = 0.0;
  std::size_t nodes = 0;
  double seconds = 0.0;
  std::optional<std::string> error;
};

AoConfig make_ao_config(const ExperimentSpec& spec, std::size_t l_max, std::size_t i_max, bool validation_stop,
                        std::uint64_t seed, const std::optional<Dataset>& validation) {
  AoConfig ao;
  ao.inner = spec.scn;
  ao.inner.l_max = l_max;
  ao.inner.seed = seed;
  ao.i_max = i_max;
  ao.warm_start = spec.warm_start;
  ao.stop_on_validation_rise = validation_stop;
  if (validation_stop && validation) {
    ao.validation = ValidationSet{validation->x, validation->y};
    ao.node_patience = spec.node_patience;
  }
  return ao;
}

TrialOutcome run_trial(const ExperimentSpec& spec, const Dataset* csv_data, const CellDef& cell, std::size_t trial) {
  TrialOutcome out;
  out.seed = model_seed(spec.seed_base, cell.algorithm, cell.zeta, cell.lambda, cell.l, trial);
  const auto start = std::chrono::steady_clock::now();
  try {
    const TrialData data = make_trial_data(spec, csv_data, cell.zeta, trial);
    Rng rng(out.seed);
    ScnModel model;
    switch (cell.algorithm) {
      case Algorithm::RscKde: {
        const AoConfig ao = make_ao_config(spec, cell.l, spec.i_max, spec.use_validation, out.seed, data.validation);
        model = train_rsc_kde(data.train.x, data.train.y, ao, rng).model;
        break;
      }
      case Algorithm::ScnPlain: {
        const AoConfig ao = make_ao_config(spec, cell.l, 1, false, out.seed, std::nullopt);
        model = train_rsc_kde(data.train.x, data.train.y, ao, rng).model;
        break;
      }
      case Algorithm::Rvfl:
      case Algorithm::WeightedRvfl: {
        RvflConfig rc;
        rc.l = cell.l;
        rc.lambda = *cell.lambda;
        rc.seed = out.seed;
        rc.weighted = cell.algorithm == Algorithm::WeightedRvfl;
        rc.ao_rounds = spec.i_max;
        rc.wls_route = spec.rvfl_wls_route;
        model = rc.weighted ? train_weighted_rvfl(data.train.x, data.train.y, rc, rng).model
                            : train_rvfl(data.train.x, data.train.y, rc, rng);
        break;
      }
    }
    out.nodes = model.node_count();
    out.rmse = rmse(forward(model, data.test.x), data.test.y);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// Runs fn(task) for task in [0, count) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

std::map<std::string, std::string> environment_stamp() {
  std::map<std::string, std::string> env;
#if defined(__clang__)
  env["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  env["compiler"] = std::string("gcc ") + __VERSION__;
#endif
  env["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
  env["hardware_threads"] = std::to_string(std::thread::hardware_concurrency());
  env["rng"] = "mt19937_64, 53-bit uniforms";
  return env;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::optional<Dataset> csv_data = load_source(spec.source);
  const Dataset* csv_ptr = csv_data ? &*csv_data : nullptr;

  std::vector<CellDef> cells;
  for (auto a : spec.algorithms) {
    for (double z : spec.zeta_grid) {
      if (uses_fixed_basis(a)) {
        for (double lam : spec.lambda_grid)
          for (std::size_t l : spec.l_grid) cells.push_back({a, z, lam, l});
      } else {
        cells.push_back({a, z, std::nullopt, spec.scn.l_max});
      }
    }
  }
  std::sort(cells.begin(), cells.end(), [](const CellDef& a, const CellDef& b) {
    return std::tuple(static_cast<int>(a.algorithm), a.zeta, a.lambda.value_or(0.0), a.l) <
           std::tuple(static_cast<int>(b.algorithm), b.zeta, b.lambda.value_or(0.0), b.l);
  });

  const std::size_t tasks = cells.size() * spec.trials;
  std::vector<TrialOutcome> outcomes(tasks);
  parallel_for(tasks, spec.workers, [&](std::size_t task) {
    const std::size_t c = task / spec.trials;
    outcomes[task] = run_trial(spec, csv_ptr, cells[c], task % spec.trials);
  });

  ExperimentReport report;
  report.environment = environment_stamp();
  report.spec_echo = spec.echo();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellResult r;
    r.algorithm = cells[c].algorithm;
    r.zeta = cells[c].zeta;
    r.lambda = cells[c].lambda;
    r.l = cells[c].l;
    for (std::size_t t = 0; t < spec.trials; ++t) {
      const TrialOutcome& o = outcomes[c * spec.trials + t];
      r.wall_time += o.seconds;
      if (o.error && !r.failed) {
        r.failed = true;
        r.failure = "trial " + std::to_string(t) + ": " + *o.error;
      }
      r.seeds.push_back(o.seed);
      r.trial_rmse.push_back(o.rmse);
      r.trial_nodes.push_back(o.nodes);
    }
    if (r.failed) {
      r.trial_rmse.clear();
      r.trial_nodes.clear();
      r.trials = 0;
    } else {
      r.trials = spec.trials;
      std::tie(r.mean_rmse, r.std_rmse) = mean_std(r.trial_rmse);
    }
    report.cells.push_back(std::move(r));
  }
  return report;
}

SweepTable robustness_sweep(const ExperimentSpec& spec, const std::vector<std::size_t>& l_grid,
                            const std::vector<std::size_t>& nu_grid) {
  spec.validate();
  if (l_grid.empty() || nu_grid.empty()) throw ContractViolation("robustness_sweep: grids must be non-empty");
  for (auto v : nu_grid)
    if (v < 1) throw ContractViolation("robustness_sweep: nu values must be at least 1");
  for (auto l : l_grid)
    if (l < 1) throw ContractViolation("robustness_sweep: L values must be at least 1");

  const std::optional<Dataset> csv_data = load_source(spec.source);
  const Dataset* csv_ptr = csv_data ? &*csv_data : nullptr;

  SweepTable table;
  table.zetas = spec.zeta_grid;
  table.nus = nu_grid;
  table.ls = l_grid;
  const std::size_t nz = table.zetas.size(), nv = nu_grid.size(), nl = l_grid.size();
  std::vector<double> rmses(nz * nv * nl * spec.trials, 0.0);
  std::vector<std::string> errors(rmses.size());

  parallel_for(rmses.size(), spec.workers, [&](std::size_t task) {
    const std::size_t trial = task % spec.trials;
    std::size_t rest = task / spec.trials;
    const std::size_t li = rest % nl;
    rest /= nl;
    const std::size_t vi = rest % nv;
    const std::size_t zi = rest / nv;
    const double zeta = table.zetas[zi];
    try {
      const TrialData data = make_trial_data(spec, csv_ptr, zeta, trial);
      const std::uint64_t seed =
          mix64(model_seed(spec.seed_base, Algorithm::RscKde, zeta, std::nullopt, l_grid[li], trial) ^ nu_grid[vi]);
      AoConfig ao = make_ao_config(spec, l_grid[li], nu_grid[vi], false, seed, std::nullopt);
      ao.inner.epsilon = 0.0;
      Rng rng(seed);
      const ScnModel model = train_rsc_kde(data.train.x, data.train.y, ao, rng).model;
      rmses[task] = rmse(forward(model, data.test.x), data.test.y);
    } catch (const std::exception& e) {
      errors[task] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw NumericalFailure("robustness sweep trial failed: " + e);

  table.mean.assign(nz, std::vector<std::vector<double>>(nv, std::vector<double>(nl, 0.0)));
  table.stdev = table.mean;
  for (std::size_t zi = 0; zi < nz; ++zi)
    for (std::size_t vi = 0; vi < nv; ++vi)
      for (std::size_t li = 0; li < nl; ++li) {
        const std::size_t base = ((zi * nv + vi) * nl + li) * spec.trials;
        const std::vector<double> v(rmses.begin() + static_cast<std::ptrdiff_t>(base),
                                    rmses.begin() + static_cast<std::ptrdiff_t>(base + spec.trials));
        std::tie(table.mean[zi][vi][li], table.stdev[zi][vi][li]) = mean_std(v);
      }
  return table;
}

}  // namespace rscn
