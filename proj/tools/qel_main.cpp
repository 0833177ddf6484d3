// qel: config-driven experiment harness. Each subcommand runs one experiment
// from a JSON config, writes per-trial documents and plot-ready tables, and
// prints a short summary. Exit code 0 on success; on failure a JSON error
// record goes to stderr.

#include <array>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qel/experiments.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  long long trials = -1;
  long long seed = -1;
  std::string out_dir;
};

int run(qel::Experiment experiment, const CliOverrides& cli) {
  qel::ExperimentConfig cfg = qel::load_config(cli.config_path);
  if (cfg.experiment != experiment) {
    throw std::invalid_argument(
        std::string("config is for experiment '") +
        qel::experiment_name(cfg.experiment) + "', but subcommand is '" +
        qel::experiment_name(experiment) + "'");
  }
  if (cli.trials >= 1) cfg.trials = static_cast<std::size_t>(cli.trials);
  if (cli.seed >= 0) cfg.seed = static_cast<std::uint64_t>(cli.seed);
  if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
  cfg.validate();

  const qel::ExperimentResult result = qel::run_experiment(cfg);
  const std::vector<std::string> files = qel::emit(result, cfg.out_dir);

  std::printf("experiment: %s\n", qel::experiment_name(cfg.experiment));
  std::printf("trials: %zu (failures: %zu)\n", result.trials.size(),
              result.failures);
  std::printf("mean final loss: %.6g\n", result.mean_final_loss);
  for (const auto& row : result.threshold_table) {
    std::printf("P(total optimal probability > %.2f) = %.3f\n", row.threshold,
                row.frequency);
  }
  double wall = 0.0;
  for (const auto& t : result.trials) wall += t.wall_seconds;
  std::printf("total trial wall time: %.1f s\n", wall);
  std::printf("wrote %zu files under %s\n", files.size(), cfg.out_dir.c_str());
  return result.failures == result.trials.size() && !result.trials.empty() ? 1
                                                                           : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum extremal learning experiment harness"};
  app.require_subcommand(1);

  const std::array<qel::Experiment, 8> experiments = {
      qel::Experiment::Fit,      qel::Experiment::Dqc,
      qel::Experiment::MaxCut,   qel::Experiment::Chain2,
      qel::Experiment::Chain3,   qel::Experiment::Molecule,
      qel::Experiment::AlphaScan, qel::Experiment::Mixed,
  };

  CliOverrides cli;
  for (qel::Experiment e : experiments) {
    CLI::App* sub = app.add_subcommand(qel::experiment_name(e));
    sub->add_option("--config", cli.config_path, "experiment config (JSON)")
        ->required();
    sub->add_option("--trials", cli.trials, "override the config's trial count");
    sub->add_option("--seed", cli.seed, "override the config's base seed");
    sub->add_option("--out", cli.out_dir, "override the config's output directory");
    sub->callback([e, &cli] {
      const int rc = run(e, cli);
      if (rc != 0) std::exit(rc);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = {{"message", e.what()}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
  return 0;
}
