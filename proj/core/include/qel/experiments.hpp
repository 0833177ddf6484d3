#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qel/extremal.hpp"
#include "qel/model.hpp"
#include "qel/optimize.hpp"
#include "qel/problems.hpp"
#include "qel/training.hpp"

namespace qel {

enum class Experiment : std::uint8_t {
  Fit,
  Dqc,
  MaxCut,
  Chain2,
  Chain3,
  Molecule,
  AlphaScan,
  Mixed,
};

const char* experiment_name(Experiment e);
Experiment experiment_from_name(std::string_view name);

struct DatasetSpec {
  std::size_t size = 0;     // discrete: samples to draw; 0 = the full space
  double fraction = -1.0;   // discrete: fraction of 2^N, overrides size if >= 0
  std::size_t grid_points = 41;  // continuous: training/collocation grid
  bool exclude_window = true;    // drop a window around the known optimum
  double window = 0.1;           // half-width of that window
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Fit;
  std::size_t n_qubits = 3;
  std::size_t model_depth = 3;
  std::size_t extremizer_depth = 0;  // discrete stage; 0 = n_qubits^2
  OptimizerConfig model_opt;
  OptimizerConfig model_opt_stage2;  // epochs == 0 disables the stage
  OptimizerConfig extremizer_opt;
  Direction direction = Direction::Maximize;
  DatasetSpec dataset;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  double alpha = 1.0;
  double beta = 0.5;
  std::vector<double> thresholds{0.1, 0.2, 0.3, 0.5};
  double separation = 5.0;   // maxcut cluster spacing
  double alpha_max = 5.0;    // alpha scan range: alpha = 1.0 .. alpha_max
  double alpha_step = 0.1;
  double extremizer_x0 = 0.5;
  std::string out_dir = "results";

  void validate() const;
};

// Paper-reported hyperparameters for each experiment.
ExperimentConfig default_config(Experiment e);

struct CurvePoint {
  double x = 0.0;
  double truth = 0.0;  // target function (fit, scaled) / analytic solution (dqc)
  double model = 0.0;
};

struct TrialReport {
  std::uint64_t seed = 0;
  std::vector<double> model_loss;  // loss before each epoch
  double final_model_loss = 0.0;
  std::vector<double> extremizer_trajectory;
  // continuous / mixed results
  double final_input = 0.0;
  double final_value = 0.0;
  // discrete results
  std::map<std::string, double> distribution;
  std::vector<std::pair<std::string, double>> top_candidates;
  double total_optimal_probability = 0.0;
  std::vector<std::string> optimal_set;
  double oracle_value = 0.0;
  // diagnostics
  double grid_max_value = 0.0;  // trained-model maximum over a dense grid
  double grid_argmax = 0.0;
  double max_abs_deviation = 0.0;  // dqc: |model - analytic| on the grid
  std::vector<CurvePoint> curve;   // fit / dqc plot data
  double wall_seconds = 0.0;       // not emitted (keeps outputs byte-stable)
  std::string error;               // per-trial failure record
};

struct ThresholdRow {
  double threshold = 0.0;
  double frequency = 0.0;  // fraction of trials with total prob > threshold
};

struct AlphaScanRow {
  double alpha = 1.0;
  std::uint64_t seed = 0;
  double total_optimal_probability = 0.0;
  bool top2_matches_optimal = false;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialReport> trials;
  std::vector<ThresholdRow> threshold_table;
  std::vector<AlphaScanRow> alpha_rows;  // alpha_scan only
  double mean_final_loss = 0.0;
  double stdev_final_loss = 0.0;
  std::size_t failures = 0;
};

// Fraction of successful trials whose total optimal probability exceeds each
// threshold.
std::vector<ThresholdRow> threshold_frequency(std::span<const TrialReport> reports,
                                              std::span<const double> thresholds);

// Runs every trial (seeds config.seed, config.seed + 1, ...), scores against
// the exact oracles and aggregates. Trials run on a worker pool sized by the
// QEL_WORKERS environment variable (default: available parallelism).
ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes one JSON document per trial plus plot-ready tables into out_dir;
// byte-stable for identical results. Returns the written paths.
std::vector<std::string> emit(const ExperimentResult& result,
                              const std::string& out_dir);

// Strict config I/O: unknown or ill-typed keys are rejected. The file may
// omit any key, in which case the experiment's default applies.
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

}  // namespace qel
