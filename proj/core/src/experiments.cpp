#include "qel/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "qel/gradients.hpp"

namespace qel {

namespace {

constexpr double kArgmaxSin5x = 0.31415926535897931;  // pi/10

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

std::size_t resolve_discrete_size(const DatasetSpec& ds, std::size_t n_bits) {
  const std::uint64_t space = std::uint64_t{1} << n_bits;
  if (ds.fraction >= 0.0) {
    const auto s = static_cast<std::uint64_t>(
        std::llround(ds.fraction * static_cast<double>(space)));
    return static_cast<std::size_t>(std::clamp<std::uint64_t>(s, 1, space));
  }
  if (ds.size == 0) return static_cast<std::size_t>(space);
  return static_cast<std::size_t>(
      std::min<std::uint64_t>(ds.size, space));
}

// dense scan of the trained model over [lo, hi]
void scan_model(const QuantumModel& model, double lo, double hi,
                std::size_t points, double& max_value, double& argmax) {
  max_value = -std::numeric_limits<double>::infinity();
  argmax = lo;
  for (std::size_t i = 0; i < points; ++i) {
    const double x =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double v = model.evaluate(x);
    if (v > max_value) {
      max_value = v;
      argmax = x;
    }
  }
}

std::vector<OptimizerConfig> model_stages(const ExperimentConfig& cfg) {
  std::vector<OptimizerConfig> stages{cfg.model_opt};
  if (cfg.model_opt_stage2.epochs > 0) stages.push_back(cfg.model_opt_stage2);
  return stages;
}

TrialReport run_fit_trial(const ExperimentConfig& cfg, std::uint64_t seed,
                          std::size_t workers) {
  Timer timer;
  TrialReport r;
  r.seed = seed;

  double ex_lo = 1.0, ex_hi = 0.0;  // empty window
  if (cfg.dataset.exclude_window) {
    ex_lo = kArgmaxSin5x - cfg.dataset.window;
    ex_hi = kArgmaxSin5x + cfg.dataset.window;
  }
  const Dataset data = make_continuous_training_set(
      sin5x, 0.0, 1.0, cfg.dataset.grid_points, ex_lo, ex_hi);

  Rng rng(seed);
  CircuitIR ansatz = hardware_efficient_ansatz(cfg.n_qubits, cfg.model_depth);
  std::vector<double> theta0 = random_theta(ansatz.n_variational(), rng);
  QuantumModel model(chebyshev_tower(cfg.n_qubits), std::move(ansatz),
                     Observable{cfg.n_qubits, cfg.alpha, cfg.beta},
                     std::move(theta0));

  const MseLoss loss(data, workers);
  const TrainReport train = fit(model, loss, model_stages(cfg));
  r.model_loss = train.loss_trajectory;
  r.final_model_loss = train.final_loss;

  ExtremizeConfig ext;
  ext.direction = cfg.direction;
  ext.lr = cfg.extremizer_opt.lr;
  ext.epochs = cfg.extremizer_opt.epochs;
  ext.x0 = cfg.extremizer_x0;
  ext.lo = 0.0;
  ext.hi = 1.0;
  const ExtremalResult ex = extremize_continuous(model, ext);
  r.extremizer_trajectory = ex.trajectory;
  r.final_input = ex.best_input;
  r.final_value = ex.best_value;

  scan_model(model, 0.0, 1.0, 10000, r.grid_max_value, r.grid_argmax);
  r.curve.reserve(200);
  for (std::size_t i = 0; i < 200; ++i) {
    const double x = static_cast<double>(i) / 199.0;
    r.curve.push_back({x, sin5x(x), model.evaluate(x)});
  }
  r.wall_seconds = timer.seconds();
  return r;
}

TrialReport run_dqc_trial(const ExperimentConfig& cfg, std::uint64_t seed,
                          std::size_t workers) {
  Timer timer;
  TrialReport r;
  r.seed = seed;

  OdeSpec ode;
  ode.rhs = ode_rhs;
  ode.boundary_x = 0.0;
  ode.boundary_value = 0.0;
  ode.lo = 0.0;
  ode.hi = 1.0;
  ode.collocation = cfg.dataset.grid_points;
  // keeps the x = 1 residual trainable while leaving no room for a free
  // oscillation between the last enforced point and the endpoint
  ode.derivative_margin = 2e-3;

  Rng rng(seed);
  CircuitIR ansatz = hardware_efficient_ansatz(cfg.n_qubits, cfg.model_depth);
  std::vector<double> theta0 = random_theta(ansatz.n_variational(), rng);
  QuantumModel model(chebyshev_tower(cfg.n_qubits), std::move(ansatz),
                     Observable{cfg.n_qubits, cfg.alpha, cfg.beta},
                     std::move(theta0));

  const OdeResidualLoss loss(ode, workers);
  const TrainReport train = fit(model, loss, model_stages(cfg));
  r.model_loss = train.loss_trajectory;
  r.final_model_loss = train.final_loss;

  ExtremizeConfig ext;
  ext.direction = cfg.direction;
  ext.lr = cfg.extremizer_opt.lr;
  ext.epochs = cfg.extremizer_opt.epochs;
  ext.x0 = cfg.extremizer_x0;
  ext.lo = 0.0;
  ext.hi = 1.0;
  const ExtremalResult ex = extremize_continuous(model, ext);
  r.extremizer_trajectory = ex.trajectory;
  r.final_input = ex.best_input;
  r.final_value = ex.best_value;

  double dev = 0.0;
  for (double x : ode.grid()) {
    dev = std::max(dev, std::abs(model.evaluate(x) - ode_solution(x)));
  }
  r.max_abs_deviation = dev;
  scan_model(model, 0.0, 1.0, 10000, r.grid_max_value, r.grid_argmax);
  r.curve.reserve(200);
  for (std::size_t i = 0; i < 200; ++i) {
    const double x = static_cast<double>(i) / 199.0;
    r.curve.push_back({x, ode_solution(x), model.evaluate(x)});
  }
  r.wall_seconds = timer.seconds();
  return r;
}

struct DiscreteProblem {
  std::function<double(std::uint64_t)> cost;
  std::size_t n_bits = 0;
};

DiscreteProblem make_problem(const ExperimentConfig& cfg, Rng& rng) {
  switch (cfg.experiment) {
    case Experiment::MaxCut:
    case Experiment::AlphaScan: {
      auto inst = std::make_shared<MaxCutInstance>(
          gen_maxcut_clusters(cfg.n_qubits, cfg.separation, rng));
      return {[inst](std::uint64_t z) { return maxcut_cost(*inst, z); },
              cfg.n_qubits};
    }
    case Experiment::Chain2:
    case Experiment::Chain3: {
      const int order = cfg.experiment == Experiment::Chain2 ? 2 : 3;
      auto inst = std::make_shared<CorrelationChainInstance>(
          gen_correlation_chain(cfg.n_qubits, order, rng));
      return {[inst](std::uint64_t z) { return chain_cost(*inst, z); },
              cfg.n_qubits};
    }
    case Experiment::Molecule: {
      auto inst = std::make_shared<MoleculeInstance>(gen_molecule(rng));
      return {[inst](std::uint64_t z) { return molecule_energy(*inst, z); }, 5};
    }
    default:
      throw std::logic_error("not a discrete experiment");
  }
}

TrialReport run_discrete_trial(const ExperimentConfig& cfg, std::uint64_t seed,
                               std::size_t workers) {
  Timer timer;
  TrialReport r;
  r.seed = seed;

  Rng rng(seed);
  const DiscreteProblem problem = make_problem(cfg, rng);
  const std::size_t n = problem.n_bits;

  const BruteForceResult oracle =
      brute_force_optimum(n, problem.cost, cfg.direction);
  r.optimal_set = oracle.optimal;
  r.oracle_value = oracle.value;

  const std::size_t size = resolve_discrete_size(cfg.dataset, n);
  const Dataset raw = make_discrete_training_set(n, size, rng, problem.cost);
  auto [scaled, scaling] = scale_targets(raw);

  CircuitIR ansatz = hardware_efficient_ansatz(n, cfg.model_depth);
  std::vector<double> theta0 = random_theta(ansatz.n_variational(), rng);
  const std::uint64_t extremizer_seed = rng.next_u64();

  QuantumModel model(digital_feature_map(n), std::move(ansatz),
                     Observable{n, cfg.alpha, cfg.beta}, std::move(theta0));

  const MseLoss loss(scaled, workers);
  const TrainReport train = fit(model, loss, model_stages(cfg));
  r.model_loss = train.loss_trajectory;
  r.final_model_loss = train.final_loss;

  ExtremizeConfig ext;
  ext.direction = cfg.direction;
  ext.lr = cfg.extremizer_opt.lr;
  ext.epochs = cfg.extremizer_opt.epochs;
  ext.seed = extremizer_seed;
  ext.depth = cfg.extremizer_depth;
  const DiscreteExtremizerResult trained = train_extremizer_discrete(model, ext);
  r.extremizer_trajectory = trained.trajectory;

  const ExtremalResult sampled = sample_extremizer(trained.map, 4);
  r.distribution = sampled.distribution;
  r.top_candidates = sampled.top_candidates;
  r.total_optimal_probability = total_optimal_probability(sampled, r.optimal_set);
  r.wall_seconds = timer.seconds();
  return r;
}

TrialReport run_mixed_trial(const ExperimentConfig& cfg, std::uint64_t seed,
                            std::size_t workers) {
  Timer timer;
  TrialReport r;
  r.seed = seed;

  const Dataset data = make_mixed_training_set(
      cfg.dataset.grid_points, cfg.dataset.exclude_window ? 3 : 0, 0.25,
      cfg.dataset.window);

  Rng rng(seed);
  const std::size_t n_cont = cfg.n_qubits - 2;
  CircuitIR ansatz = hardware_efficient_ansatz(cfg.n_qubits, cfg.model_depth);
  std::vector<double> theta0 = random_theta(ansatz.n_variational(), rng);
  QuantumModel model(mixed_feature_map(n_cont, 2), std::move(ansatz),
                     Observable{cfg.n_qubits, cfg.alpha, cfg.beta},
                     std::move(theta0));

  const MseLoss loss(data, workers);
  const TrainReport train = fit(model, loss, model_stages(cfg));
  r.model_loss = train.loss_trajectory;
  r.final_model_loss = train.final_loss;

  ExtremizeConfig ext;
  ext.direction = cfg.direction;
  ext.lr = cfg.extremizer_opt.lr;
  ext.epochs = cfg.extremizer_opt.epochs;
  ext.x0 = cfg.extremizer_x0;
  const ExtremalResult ex = extremize_mixed(model, ext);
  r.extremizer_trajectory = ex.trajectory;
  r.final_input = ex.best_input;
  r.final_value = ex.best_value;
  r.distribution = ex.distribution;
  r.top_candidates = ex.top_candidates;

  const MixedOptimum oracle = mixed_function_grid_optimum(2001, cfg.direction);
  r.oracle_value = oracle.value;
  r.optimal_set = {to_bitstring(static_cast<std::uint64_t>(oracle.n - 1), 2)};
  r.total_optimal_probability = total_optimal_probability(ex, r.optimal_set);
  r.wall_seconds = timer.seconds();
  return r;
}

// one alpha-scan run: fixed instance/dataset/theta0, varying only alpha
struct AlphaContext {
  std::uint64_t seed = 0;
  DiscreteProblem problem;
  BruteForceResult oracle;
  Dataset scaled;
  std::vector<double> theta0;
  std::uint64_t extremizer_seed = 0;
};

AlphaContext make_alpha_context(const ExperimentConfig& cfg, std::uint64_t seed) {
  AlphaContext ctx;
  ctx.seed = seed;
  Rng rng(seed);
  ctx.problem = make_problem(cfg, rng);
  ctx.oracle = brute_force_optimum(ctx.problem.n_bits, ctx.problem.cost,
                                   cfg.direction);
  const std::size_t size = resolve_discrete_size(cfg.dataset, ctx.problem.n_bits);
  const Dataset raw =
      make_discrete_training_set(ctx.problem.n_bits, size, rng, ctx.problem.cost);
  ctx.scaled = scale_targets(raw).first;
  const std::size_t params = 2 * ctx.problem.n_bits * cfg.model_depth;
  ctx.theta0 = random_theta(params, rng);
  ctx.extremizer_seed = rng.next_u64();
  return ctx;
}

std::pair<AlphaScanRow, TrialReport> run_alpha_point(
    const ExperimentConfig& cfg, const AlphaContext& ctx, double alpha,
    std::size_t workers) {
  Timer timer;
  TrialReport r;
  r.seed = ctx.seed;
  r.optimal_set = ctx.oracle.optimal;
  r.oracle_value = ctx.oracle.value;

  const std::size_t n = ctx.problem.n_bits;
  QuantumModel model(digital_feature_map(n),
                     hardware_efficient_ansatz(n, cfg.model_depth),
                     Observable{n, alpha, cfg.beta}, ctx.theta0);

  const MseLoss loss(ctx.scaled, workers);
  const TrainReport train = fit(model, loss, model_stages(cfg));
  r.model_loss = train.loss_trajectory;
  r.final_model_loss = train.final_loss;

  ExtremizeConfig ext;
  ext.direction = cfg.direction;
  ext.lr = cfg.extremizer_opt.lr;
  ext.epochs = cfg.extremizer_opt.epochs;
  ext.seed = ctx.extremizer_seed;
  ext.depth = cfg.extremizer_depth;
  const DiscreteExtremizerResult trained = train_extremizer_discrete(model, ext);
  r.extremizer_trajectory = trained.trajectory;

  const ExtremalResult sampled = sample_extremizer(trained.map, 4);
  r.distribution = sampled.distribution;
  r.top_candidates = sampled.top_candidates;
  r.total_optimal_probability = total_optimal_probability(sampled, r.optimal_set);
  r.wall_seconds = timer.seconds();

  AlphaScanRow row;
  row.alpha = alpha;
  row.seed = ctx.seed;
  row.total_optimal_probability = r.total_optimal_probability;
  // whether the extremizer's two likeliest bitstrings are the optimal pair
  if (ctx.oracle.optimal.size() <= r.top_candidates.size()) {
    std::vector<std::string> top;
    for (std::size_t i = 0; i < ctx.oracle.optimal.size(); ++i) {
      top.push_back(r.top_candidates[i].first);
    }
    std::sort(top.begin(), top.end());
    row.top2_matches_optimal =
        std::equal(top.begin(), top.end(), ctx.oracle.optimal.begin(),
                   ctx.oracle.optimal.end());
  }
  return {row, std::move(r)};
}

}  // namespace

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Fit: return "fit";
    case Experiment::Dqc: return "dqc";
    case Experiment::MaxCut: return "maxcut";
    case Experiment::Chain2: return "chain2";
    case Experiment::Chain3: return "chain3";
    case Experiment::Molecule: return "molecule";
    case Experiment::AlphaScan: return "alpha_scan";
    case Experiment::Mixed: return "mixed";
  }
  return "?";
}

Experiment experiment_from_name(std::string_view name) {
  for (Experiment e : {Experiment::Fit, Experiment::Dqc, Experiment::MaxCut,
                       Experiment::Chain2, Experiment::Chain3,
                       Experiment::Molecule, Experiment::AlphaScan,
                       Experiment::Mixed}) {
    if (name == experiment_name(e)) return e;
  }
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (n_qubits < 1 || n_qubits > 24) {
    throw std::invalid_argument("config: n_qubits outside [1, 24]");
  }
  if (model_depth < 1) throw std::invalid_argument("config: model_depth must be >= 1");
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw std::invalid_argument("config: thresholds must lie in (0, 1]");
    }
  }
  if (!(alpha >= 1.0 && alpha <= 100.0)) {
    throw std::invalid_argument("config: alpha outside [1, 100]");
  }
  model_opt.validate();
  extremizer_opt.validate();
  if (model_opt_stage2.epochs > 0 && !(model_opt_stage2.lr > 0.0)) {
    throw std::invalid_argument("config: stage-2 lr must be > 0");
  }
  if (experiment == Experiment::AlphaScan) {
    if (!(alpha_step > 0.0) || alpha_max < 1.0) {
      throw std::invalid_argument("config: bad alpha scan range");
    }
  }
  if (experiment == Experiment::Mixed && n_qubits < 3) {
    throw std::invalid_argument("config: mixed experiment needs >= 3 qubits");
  }
  if (experiment == Experiment::Molecule && n_qubits != 5) {
    throw std::invalid_argument("config: the molecule benchmark is 5 qubits");
  }
  if (dataset.fraction > 1.0) {
    throw std::invalid_argument("config: dataset fraction above 1");
  }
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  cfg.model_opt = {OptimizerKind::Adam, 0.5, 50, 0.9, 0.999, 1e-8, 10};
  cfg.model_opt_stage2 = {OptimizerKind::Lbfgs, 0.05, 0, 0.9, 0.999, 1e-8, 10};
  cfg.extremizer_opt = {OptimizerKind::Adam, 0.1, 150, 0.9, 0.999, 1e-8, 10};

  switch (e) {
    case Experiment::Fit:
      cfg.n_qubits = 3;
      cfg.model_depth = 3;
      cfg.extremizer_opt = {OptimizerKind::Adam, 0.05, 100, 0.9, 0.999, 1e-8, 10};
      cfg.extremizer_x0 = 0.5;
      cfg.dataset = {0, -1.0, 41, true, 0.1};
      cfg.alpha = 6.0;  // identity scaling: the model output is <M> itself
      cfg.beta = 0.0;
      cfg.trials = 1;
      cfg.out_dir = "results/fit";
      break;
    case Experiment::Dqc:
      cfg.n_qubits = 6;
      cfg.model_depth = 7;
      cfg.model_opt = {OptimizerKind::Adam, 0.1, 250, 0.9, 0.999, 1e-8, 10};
      cfg.model_opt_stage2 = {OptimizerKind::Lbfgs, 0.05, 20, 0.9, 0.999, 1e-8, 10};
      cfg.extremizer_opt = {OptimizerKind::Adam, 0.2, 100, 0.9, 0.999, 1e-8, 10};
      cfg.extremizer_x0 = 0.25;
      cfg.dataset = {0, -1.0, 50, false, 0.0};
      cfg.alpha = 12.0;  // identity scaling: raw magnetization
      cfg.beta = 0.0;
      cfg.trials = 1;
      cfg.out_dir = "results/dqc";
      break;
    case Experiment::MaxCut:
      cfg.n_qubits = 6;
      cfg.model_depth = 36;
      cfg.extremizer_depth = 36;
      cfg.trials = 20;
      cfg.dataset = {0, -1.0, 0, false, 0.0};  // full input space
      cfg.out_dir = "results/maxcut";
      break;
    case Experiment::Chain2:
    case Experiment::Chain3:
      cfg.n_qubits = 6;
      cfg.model_depth = 36;
      cfg.extremizer_depth = 36;
      cfg.trials = 20;
      cfg.dataset = {0, -1.0, 0, false, 0.0};
      cfg.out_dir = e == Experiment::Chain2 ? "results/chain2" : "results/chain3";
      break;
    case Experiment::Molecule:
      cfg.n_qubits = 5;
      cfg.model_depth = 25;
      cfg.extremizer_depth = 25;
      cfg.direction = Direction::Minimize;
      cfg.trials = 20;
      cfg.dataset = {0, -1.0, 0, false, 0.0};
      cfg.out_dir = "results/molecule";
      break;
    case Experiment::AlphaScan:
      cfg.n_qubits = 6;
      cfg.model_depth = 36;
      cfg.extremizer_depth = 36;
      // gentle extremizer steps keep the candidate distribution graded, so
      // the per-alpha total optimal probability reflects the trained
      // landscape instead of collapsing onto a single bitstring
      cfg.extremizer_opt = {OptimizerKind::Adam, 0.01, 150, 0.9, 0.999, 1e-8, 10};
      cfg.trials = 5;  // seeds
      cfg.dataset = {2, -1.0, 0, false, 0.0};
      cfg.alpha_max = 5.0;
      cfg.alpha_step = 0.1;
      cfg.out_dir = "results/alpha_scan";
      break;
    case Experiment::Mixed:
      cfg.n_qubits = 5;
      cfg.model_depth = 10;
      cfg.model_opt = {OptimizerKind::Adam, 0.5, 258, 0.9, 0.999, 1e-8, 10};
      cfg.extremizer_opt = {OptimizerKind::Adam, 0.01, 100, 0.9, 0.999, 1e-8, 10};
      cfg.extremizer_x0 = 0.0;
      cfg.direction = Direction::Minimize;
      cfg.alpha = 10.0;  // identity scaling
      cfg.beta = 0.0;
      cfg.dataset = {0, -1.0, 21, true, 0.1};
      cfg.trials = 1;
      cfg.out_dir = "results/mixed";
      break;
  }
  return cfg;
}

std::vector<ThresholdRow> threshold_frequency(
    std::span<const TrialReport> reports, std::span<const double> thresholds) {
  if (reports.empty()) {
    throw std::invalid_argument("threshold_frequency: no reports");
  }
  std::size_t ok = 0;
  for (const TrialReport& r : reports) ok += r.error.empty() ? 1 : 0;
  std::vector<ThresholdRow> table;
  table.reserve(thresholds.size());
  for (double t : thresholds) {
    std::size_t hits = 0;
    for (const TrialReport& r : reports) {
      if (r.error.empty() && r.total_optimal_probability > t) ++hits;
    }
    table.push_back(
        {t, ok == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(ok)});
  }
  return table;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  result.config = cfg;

  const std::size_t pool = worker_count();

  if (cfg.experiment == Experiment::AlphaScan) {
    std::vector<AlphaContext> contexts;
    contexts.reserve(cfg.trials);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      contexts.push_back(make_alpha_context(cfg, cfg.seed + t));
    }
    std::vector<double> alphas;
    for (double a = 1.0; a <= cfg.alpha_max + 1e-9; a += cfg.alpha_step) {
      alphas.push_back(std::round(a * 1000.0) / 1000.0);
    }
    const std::size_t rows = contexts.size() * alphas.size();
    result.trials.resize(rows);
    result.alpha_rows.resize(rows);
    parallel_for(rows, pool, [&](std::size_t i) {
      const AlphaContext& ctx = contexts[i / alphas.size()];
      const double alpha = alphas[i % alphas.size()];
      auto [row, report] = run_alpha_point(cfg, ctx, alpha, 1);
      result.alpha_rows[i] = row;
      result.trials[i] = std::move(report);
    });
  } else {
    result.trials.resize(cfg.trials);
    const std::size_t trial_workers = cfg.trials > 1 ? pool : 1;
    const std::size_t inner_workers = cfg.trials > 1 ? 1 : pool;
    parallel_for(cfg.trials, trial_workers, [&](std::size_t t) {
      const std::uint64_t seed = cfg.seed + t;
      TrialReport r;
      try {
        switch (cfg.experiment) {
          case Experiment::Fit:
            r = run_fit_trial(cfg, seed, inner_workers);
            break;
          case Experiment::Dqc:
            r = run_dqc_trial(cfg, seed, inner_workers);
            break;
          case Experiment::Mixed:
            r = run_mixed_trial(cfg, seed, inner_workers);
            break;
          default:
            r = run_discrete_trial(cfg, seed, inner_workers);
            break;
        }
      } catch (const std::exception& e) {
        r.seed = seed;
        r.error = e.what();
      }
      result.trials[t] = std::move(r);
    });
  }

  // aggregates over completed trials
  std::vector<double> losses;
  for (const TrialReport& r : result.trials) {
    if (!r.error.empty()) {
      ++result.failures;
      continue;
    }
    losses.push_back(r.final_model_loss);
  }
  if (!losses.empty()) {
    const double mean =
        std::accumulate(losses.begin(), losses.end(), 0.0) /
        static_cast<double>(losses.size());
    double var = 0.0;
    for (double l : losses) var += (l - mean) * (l - mean);
    var /= static_cast<double>(losses.size());
    result.mean_final_loss = mean;
    result.stdev_final_loss = std::sqrt(var);
  }

  const bool discrete = cfg.experiment == Experiment::MaxCut ||
                        cfg.experiment == Experiment::Chain2 ||
                        cfg.experiment == Experiment::Chain3 ||
                        cfg.experiment == Experiment::Molecule;
  if (discrete && !result.trials.empty()) {
    result.threshold_table = threshold_frequency(result.trials, cfg.thresholds);
  }
  return result;
}

}  // namespace qel
