#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rscn/configurator.hpp"
#include "rscn/data.hpp"
#include "rscn/metrics.hpp"

namespace rscn {

enum class Algorithm { RscKde, ScnPlain, Rvfl, WeightedRvfl };

std::string to_string(Algorithm a);
/// Accepts rsc_kde, scn_plain, rvfl, weighted_rvfl.
Algorithm algorithm_from_string(const std::string& s);

enum class SourceKind { Synthetic, SmoothProcess, Csv };

std::string to_string(SourceKind k);

struct DataSourceSpec {
  SourceKind kind = SourceKind::Synthetic;
  std::size_t n_train = 600;   // synthetic
  std::size_t n_test = 600;    // synthetic
  std::size_t n_samples = 300; // smooth process stand-in
  std::string csv_path;
  CsvSchema csv_schema;
  double train_fraction = 0.75;  // smooth process and CSV
};

struct ExperimentSpec {
  DataSourceSpec source;
  std::vector<Algorithm> algorithms{Algorithm::RscKde};
  std::vector<double> zeta_grid{0.1};
  std::vector<double> lambda_grid{1.0};  // baselines only
  std::vector<std::size_t> l_grid{100};  // baselines only
  std::size_t trials = 20;
  std::uint64_t seed_base = 1;

  ScnConfig scn;
  WlsRoute rvfl_wls_route = WlsRoute::NormalEquations;  // rvfl and weighted_rvfl
  std::size_t i_max = 5;
  bool warm_start = false;
  /// Carve a clean validation split (before contamination) and use it to
  /// stop the AO loop of rsc_kde.
  bool use_validation = true;
  double validation_fraction = 0.2;
  /// Nodes without validation improvement before a build stops (rsc_kde with
  /// validation only). 0 lets builds run to their own termination.
  std::size_t node_patience = 30;

  OutlierMode outlier_mode = OutlierMode::Replace;
  std::pair<double, double> noise_range{-0.2, 0.8};

  std::size_t workers = 1;

  /// Throws ContractViolation when a grid is empty, trials is zero, or a
  /// nested configuration is invalid.
  void validate() const;
  /// Flat key/value echo recorded in reports.
  std::map<std::string, std::string> echo() const;
};

struct CellResult {
  Algorithm algorithm = Algorithm::RscKde;
  double zeta = 0.0;
  std::optional<double> lambda;  // baselines only
  std::size_t l = 0;             // fixed L (baselines) or l_max (SCN family)
  double mean_rmse = 0.0;
  double std_rmse = 0.0;         // divisor trials − 1; 0 for a single trial
  std::size_t trials = 0;        // completed trials
  std::vector<std::uint64_t> seeds;  // model seed per trial
  std::vector<double> trial_rmse;
  std::vector<std::size_t> trial_nodes;
  double wall_time = 0.0;        // seconds, summed over trials
  bool failed = false;
  std::string failure;

  friend bool operator==(const CellResult&, const CellResult&) = default;
};

struct ExperimentReport {
  std::vector<CellResult> cells;
  std::map<std::string, std::string> environment;
  std::map<std::string, std::string> spec_echo;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// Mean and sample standard deviation (divisor n − 1, 0 when n < 2).
std::pair<double, double> mean_std(const std::vector<double>& values);

/// Seed of the training/evaluation data for one (ζ, trial): shared by every
/// algorithm so comparisons within a trial are paired.
std::uint64_t data_seed(std::uint64_t seed_base, double zeta, std::size_t trial);
/// Seed of the learner for one cell and trial.
std::uint64_t model_seed(std::uint64_t seed_base, Algorithm a, double zeta, std::optional<double> lambda,
                         std::size_t l, std::size_t trial);

/// Training, validation and test sets of one trial. Training outputs are
/// contaminated; validation and test sets never are.
struct TrialData {
  Dataset train;
  std::optional<Dataset> validation;
  Dataset test;
};

TrialData make_trial_data(const ExperimentSpec& spec, const Dataset* csv_data, double zeta, std::size_t trial);

/// Loads and normalises the CSV source once; nullopt for generated sources.
std::optional<Dataset> load_source(const DataSourceSpec& source);

/// Runs every (algorithm × ζ × λ × L) cell for `trials` trials and aggregates
/// test RMSE. Cells come back sorted by (algorithm, ζ, λ, L).
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Mean test RMSE of rsc_kde per (ζ, ν, L) with l_max = L, ε = 0 and exactly
/// ν AO rounds.
struct SweepTable {
  std::vector<double> zetas;
  std::vector<std::size_t> nus;
  std::vector<std::size_t> ls;
  // mean[z][v][l], stdev[z][v][l]
  std::vector<std::vector<std::vector<double>>> mean;
  std::vector<std::vector<std::vector<double>>> stdev;
};

SweepTable robustness_sweep(const ExperimentSpec& spec, const std::vector<std::size_t>& l_grid,
                            const std::vector<std::size_t>& nu_grid);

enum class ReportFormat { Csv, Json };

/// Fixed CSV header, one row per cell.
inline constexpr const char* kReportCsvHeader = "algorithm,zeta,lambda,L,trials,mean_rmse,std_rmse,mean_nodes,status";

/// CSV: kReportCsvHeader then one row per cell; wall time and environment are
/// left out so identical runs give identical bytes. JSON: lossless dump
/// including per-trial values. Throws IoError if the sink fails.
void emit_report(const ExperimentReport& report, ReportFormat format, std::ostream& sink);
ExperimentReport report_from_json(std::istream& source);

/// Rows (ζ, ν), one column per L, as in a robustness table.
void emit_sweep(const SweepTable& table, ReportFormat format, std::ostream& sink);

}  // namespace rscn
