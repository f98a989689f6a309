// rscn: outlier-contaminated regression experiments with robust SCN learners.
//
//   rscn synth  [source + learner flags]   synthetic one-dimensional task
//   rscn csv    --data FILE [...]          CSV regression data, 75/25 split
//   rscn sweep  --l-grid ... --nu-grid ... robustness table over (L, ν)
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rscn/error.hpp"
#include "rscn/harness.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct Options {
  rscn::ExperimentSpec spec;
  std::vector<std::string> algos{"rsc_kde", "scn_plain", "rvfl", "weighted_rvfl"};
  std::string mode;
  std::string wls_route;
  std::string rvfl_wls_route;
  double noise_low = 0.0;
  double noise_high = 0.0;
  bool no_validation = false;
  std::string out;
  std::string format;
  std::vector<std::size_t> l_grid{10, 20, 30, 50, 60, 80};
  std::vector<std::size_t> nu_grid{2, 3, 5, 8, 10, 12};
  std::string sweep_source = "synthetic";
};

void add_learner_flags(CLI::App* cmd, Options& o) {
  auto& s = o.spec;
  cmd->add_option("--zeta", s.zeta_grid, "Outlier fractions")->delimiter(',');
  cmd->add_option("--mode", o.mode, "Outlier mode: replace | additive");
  cmd->add_option("--noise-low", o.noise_low, "Lower end of the outlier noise range");
  cmd->add_option("--noise-high", o.noise_high, "Upper end of the outlier noise range");
  cmd->add_option("--algos", o.algos, "rsc_kde, scn_plain, rvfl, weighted_rvfl")->delimiter(',');
  cmd->add_option("--trials", s.trials, "Trials per cell")->capture_default_str();
  cmd->add_option("--seed", s.seed_base, "Base seed")->capture_default_str();
  cmd->add_option("--out", o.out, "Report path (.csv or .json); stdout when omitted");
  cmd->add_option("--format", o.format, "csv | json (default: from --out extension, else csv)");
  cmd->add_option("--workers", s.workers, "Worker threads")->capture_default_str();

  cmd->add_option("--l-max", s.scn.l_max, "Maximum hidden nodes")->capture_default_str();
  cmd->add_option("--epsilon", s.scn.epsilon, "Weighted residual tolerance")->capture_default_str();
  cmd->add_option("--p-max", s.scn.p_max, "Candidates per scope level")->capture_default_str();
  cmd->add_option("--scopes", s.scn.scopes, "Scope ladder, ascending")->delimiter(',');
  cmd->add_option("--r0", s.scn.r0, "Initial contraction parameter")->capture_default_str();
  cmd->add_option("--wls-route", o.wls_route, "Output-weight solver for the SCN family: normal | orthogonal")
      ->check(CLI::IsMember({"normal", "orthogonal"}));
  cmd->add_option("--rvfl-wls-route", o.rvfl_wls_route, "Output-weight solver for the RVFL baselines")
      ->check(CLI::IsMember({"normal", "orthogonal"}));
  cmd->add_option("--i-max", s.i_max, "Alternating optimisation rounds")->capture_default_str();
  cmd->add_flag("--warm-start", s.warm_start, "Keep nodes after the first round, re-solve only output weights");
  cmd->add_flag("--no-validation", o.no_validation, "Do not carve a clean validation split");
  cmd->add_option("--node-patience", s.node_patience, "Nodes without validation improvement before a build stops, 0 = off")
      ->capture_default_str();

  cmd->add_option("--rvfl-lambda", s.lambda_grid, "RVFL scopes")->delimiter(',');
  cmd->add_option("--rvfl-l", s.l_grid, "RVFL hidden node counts")->delimiter(',');
}

void add_synth_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--n-train", o.spec.source.n_train, "Training samples")->capture_default_str();
  cmd->add_option("--n-test", o.spec.source.n_test, "Test grid size")->capture_default_str();
}

void add_csv_flags(CLI::App* cmd, Options& o) {
  auto& src = o.spec.source;
  cmd->add_option("--data", src.csv_path, "CSV file");
  cmd->add_option("--inputs", src.csv_schema.inputs, "Input columns (names or 0-based indices)")->delimiter(',');
  cmd->add_option("--outputs", src.csv_schema.outputs, "Output columns (names or 0-based indices)")->delimiter(',');
  cmd->add_flag("--header", src.csv_schema.has_header, "First line is a header");
  cmd->add_option("--train-frac", src.train_fraction, "Training fraction")->capture_default_str();
}

rscn::ReportFormat pick_format(const Options& o) {
  if (o.format == "json") return rscn::ReportFormat::Json;
  if (o.format == "csv") return rscn::ReportFormat::Csv;
  if (!o.format.empty()) throw rscn::ContractViolation("unknown format '" + o.format + "'");
  const bool json = o.out.size() >= 5 && o.out.compare(o.out.size() - 5, 5, ".json") == 0;
  return json ? rscn::ReportFormat::Json : rscn::ReportFormat::Csv;
}

template <typename Emit>
void write_output(const Options& o, Emit&& emit) {
  if (o.out.empty()) {
    emit(std::cout);
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw rscn::IoError("cannot open '" + o.out + "' for writing");
  emit(f);
}

void set_noise_defaults(Options& o, double low, double high) {
  o.noise_low = low;
  o.noise_high = high;
}

void finalize(Options& o, rscn::OutlierMode default_mode) {
  auto& s = o.spec;
  s.outlier_mode = o.mode.empty() ? default_mode : rscn::outlier_mode_from_string(o.mode);
  s.noise_range = {o.noise_low, o.noise_high};
  s.use_validation = !o.no_validation;
  const auto route = [](const std::string& r) {
    return r == "normal" ? rscn::WlsRoute::NormalEquations : rscn::WlsRoute::ScaledOrthogonal;
  };
  if (!o.wls_route.empty()) s.scn.wls_route = route(o.wls_route);
  if (!o.rvfl_wls_route.empty()) s.rvfl_wls_route = route(o.rvfl_wls_route);
  s.algorithms.clear();
  for (const auto& a : o.algos) s.algorithms.push_back(rscn::algorithm_from_string(a));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust stochastic configuration networks: contaminated-regression experiments"};
  app.require_subcommand(1);

  Options synth_opts;
  synth_opts.spec.zeta_grid = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  set_noise_defaults(synth_opts, -0.2, 0.8);
  auto* synth = app.add_subcommand("synth", "Synthetic function-approximation experiment");
  add_synth_flags(synth, synth_opts);
  add_learner_flags(synth, synth_opts);

  Options csv_opts;
  csv_opts.spec.zeta_grid = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  csv_opts.spec.source.kind = rscn::SourceKind::Csv;
  set_noise_defaults(csv_opts, -0.5, 0.5);
  csv_opts.spec.lambda_grid = {0.1, 0.5, 1, 3, 5};
  csv_opts.spec.l_grid = {30, 50, 100, 150, 200};
  auto* csv = app.add_subcommand("csv", "Benchmark experiment on a CSV dataset");
  add_csv_flags(csv, csv_opts);
  add_learner_flags(csv, csv_opts);
  csv->get_option("--data")->required();

  Options sweep_opts;
  sweep_opts.spec.zeta_grid = {0.0, 0.1, 0.3};
  // Noise defaults follow the source: replacement on [-0.2, 0.8] for the
  // synthetic task, additive on [-0.5, 0.5] otherwise.
  auto* sweep = app.add_subcommand("sweep", "Robustness table over hidden-node count L and AO rounds nu");
  sweep->add_option("--l-grid", sweep_opts.l_grid, "Hidden node counts")->delimiter(',');
  sweep->add_option("--nu-grid", sweep_opts.nu_grid, "AO round counts")->delimiter(',');
  sweep->add_option("--source", sweep_opts.sweep_source, "synthetic | smooth | csv")->capture_default_str();
  add_synth_flags(sweep, sweep_opts);
  add_csv_flags(sweep, sweep_opts);
  sweep->add_option("--n-samples", sweep_opts.spec.source.n_samples, "Samples of the smooth stand-in source")
      ->capture_default_str();
  add_learner_flags(sweep, sweep_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      finalize(synth_opts, rscn::OutlierMode::Replace);
      const auto report = rscn::run_experiment(synth_opts.spec);
      write_output(synth_opts, [&](std::ostream& os) { rscn::emit_report(report, pick_format(synth_opts), os); });
    } else if (csv->parsed()) {
      finalize(csv_opts, rscn::OutlierMode::Additive);
      const auto report = rscn::run_experiment(csv_opts.spec);
      write_output(csv_opts, [&](std::ostream& os) { rscn::emit_report(report, pick_format(csv_opts), os); });
    } else if (sweep->parsed()) {
      auto& src = sweep_opts.spec.source;
      const auto& s = sweep_opts.sweep_source;
      if (!src.csv_path.empty() || s == "csv") {
        src.kind = rscn::SourceKind::Csv;
      } else if (s == "smooth") {
        src.kind = rscn::SourceKind::SmoothProcess;
      } else if (s != "synthetic") {
        throw rscn::ContractViolation("unknown sweep source '" + s + "'");
      }
      const bool replace = src.kind == rscn::SourceKind::Synthetic;
      if (sweep->count("--noise-low") == 0) sweep_opts.noise_low = replace ? -0.2 : -0.5;
      if (sweep->count("--noise-high") == 0) sweep_opts.noise_high = replace ? 0.8 : 0.5;
      finalize(sweep_opts, replace ? rscn::OutlierMode::Replace : rscn::OutlierMode::Additive);
      const auto table = rscn::robustness_sweep(sweep_opts.spec, sweep_opts.l_grid, sweep_opts.nu_grid);
      write_output(sweep_opts, [&](std::ostream& os) { rscn::emit_sweep(table, pick_format(sweep_opts), os); });
    }
  } catch (const rscn::ContractViolation& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const rscn::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const rscn::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
