#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "qel/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace qel {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

json optimizer_to_json(const OptimizerConfig& o) {
  json j;
  j["kind"] = o.kind == OptimizerKind::Adam ? "adam" : "lbfgs";
  j["lr"] = o.lr;
  j["epochs"] = o.epochs;
  if (o.kind == OptimizerKind::Adam) {
    j["beta1"] = o.beta1;
    j["beta2"] = o.beta2;
    j["epsilon"] = o.epsilon;
  } else {
    j["history"] = o.history;
  }
  return j;
}

// wall time deliberately excluded: emitted bytes depend only on the results
json trial_to_json(const ExperimentConfig& cfg, const TrialReport& r) {
  json j;
  j["schema"] = "qel-trial/1";
  j["experiment"] = experiment_name(cfg.experiment);
  j["seed"] = r.seed;
  if (!r.error.empty()) {
    j["error"] = r.error;
    return j;
  }
  j["model_loss"] = r.model_loss;
  j["final_model_loss"] = r.final_model_loss;
  j["extremizer_trajectory"] = r.extremizer_trajectory;
  switch (cfg.experiment) {
    case Experiment::Fit:
    case Experiment::Dqc:
      j["best_input"] = r.final_input;
      j["best_value"] = r.final_value;
      j["grid_max_value"] = r.grid_max_value;
      j["grid_argmax"] = r.grid_argmax;
      if (cfg.experiment == Experiment::Dqc) {
        j["max_abs_deviation"] = r.max_abs_deviation;
      }
      break;
    case Experiment::Mixed: {
      j["best_input"] = r.final_input;
      j["best_value"] = r.final_value;
      json dist = json::object();
      for (const auto& [bits, p] : r.distribution) dist[bits] = p;
      j["sector_distribution"] = dist;
      j["oracle_value"] = r.oracle_value;
      break;
    }
    default: {
      json dist = json::object();
      for (const auto& [bits, p] : r.distribution) dist[bits] = p;
      j["distribution"] = dist;
      json top = json::array();
      for (const auto& [bits, p] : r.top_candidates) {
        top.push_back(json{{"bits", bits}, {"probability", p}});
      }
      j["top_candidates"] = top;
      j["total_optimal_probability"] = r.total_optimal_probability;
      j["optimal_set"] = r.optimal_set;
      j["oracle_value"] = r.oracle_value;
      break;
    }
  }
  return j;
}

std::string csv_header(std::string_view schema, std::string_view columns) {
  std::string out = "# ";
  out += schema;
  out += "\n";
  out += columns;
  out += "\n";
  return out;
}

}  // namespace

std::vector<std::string> emit(const ExperimentResult& result,
                              const std::string& out_dir) {
  const ExperimentConfig& cfg = result.config;
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  auto emit_file = [&](const std::string& name, const std::string& content) {
    const fs::path path = fs::path(out_dir) / name;
    write_text(path, content);
    written.push_back(path.string());
  };

  // one structured document per trial
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "trial_%04zu.json", i);
    emit_file(name, trial_to_json(cfg, result.trials[i]).dump(2) + "\n");
  }

  // aggregate summary
  {
    std::string s = csv_header("qel-summary/1", "key,value");
    s += "experiment," + std::string(experiment_name(cfg.experiment)) + "\n";
    s += "trials," + std::to_string(result.trials.size()) + "\n";
    s += "failures," + std::to_string(result.failures) + "\n";
    s += "mean_final_loss," + fmt(result.mean_final_loss) + "\n";
    s += "stdev_final_loss," + fmt(result.stdev_final_loss) + "\n";
    if (!result.trials.empty() && result.trials.front().error.empty()) {
      const TrialReport& first = result.trials.front();
      if (cfg.experiment == Experiment::Fit || cfg.experiment == Experiment::Dqc) {
        s += "best_input," + fmt(first.final_input) + "\n";
        s += "best_value," + fmt(first.final_value) + "\n";
        s += "grid_max_value," + fmt(first.grid_max_value) + "\n";
        s += "grid_argmax," + fmt(first.grid_argmax) + "\n";
      }
      if (cfg.experiment == Experiment::Dqc) {
        s += "max_abs_deviation," + fmt(first.max_abs_deviation) + "\n";
      }
      if (cfg.experiment == Experiment::Mixed) {
        s += "best_x," + fmt(first.final_input) + "\n";
        s += "best_value," + fmt(first.final_value) + "\n";
        s += "oracle_value," + fmt(first.oracle_value) + "\n";
      }
    }
    emit_file("summary.csv", s);
  }

  if (!result.threshold_table.empty()) {
    std::string s = csv_header("qel-thresholds/1", "threshold,frequency");
    for (const ThresholdRow& row : result.threshold_table) {
      s += fmt(row.threshold) + "," + fmt(row.frequency) + "\n";
    }
    emit_file("thresholds.csv", s);
  }

  switch (cfg.experiment) {
    case Experiment::Fit:
    case Experiment::Dqc: {
      if (result.trials.empty() || !result.trials.front().error.empty()) break;
      const TrialReport& first = result.trials.front();
      const bool dqc = cfg.experiment == Experiment::Dqc;
      std::string s =
          dqc ? csv_header("qel-curve/1", "x,analytic,model,abs_deviation")
              : csv_header("qel-curve/1", "x,target,model");
      for (const CurvePoint& p : first.curve) {
        s += fmt(p.x) + "," + fmt(p.truth) + "," + fmt(p.model);
        if (dqc) s += "," + fmt(std::abs(p.model - p.truth));
        s += "\n";
      }
      emit_file(dqc ? "dqc_curve.csv" : "fit_curve.csv", s);

      std::string l = csv_header("qel-loss/1", "epoch,loss");
      for (std::size_t e = 0; e < first.model_loss.size(); ++e) {
        l += std::to_string(e) + "," + fmt(first.model_loss[e]) + "\n";
      }
      emit_file("loss.csv", l);

      std::string t = csv_header("qel-extremizer/1", "epoch,value");
      for (std::size_t e = 0; e < first.extremizer_trajectory.size(); ++e) {
        t += std::to_string(e) + "," + fmt(first.extremizer_trajectory[e]) + "\n";
      }
      emit_file("extremizer.csv", t);
      break;
    }
    case Experiment::Mixed: {
      if (result.trials.empty() || !result.trials.front().error.empty()) break;
      const TrialReport& first = result.trials.front();
      std::string s = csv_header("qel-mixed/1", "n,probability");
      for (const auto& [bits, p] : first.distribution) {
        const auto code = from_bitstring(bits);
        s += std::to_string(code + 1) + "," + fmt(p) + "\n";
      }
      emit_file("n_distribution.csv", s);
      break;
    }
    case Experiment::AlphaScan: {
      std::string s = csv_header("qel-alpha-scan/1",
                                 "alpha,seed,total_optimal_probability,"
                                 "top2_matches_optimal");
      for (const AlphaScanRow& row : result.alpha_rows) {
        s += fmt(row.alpha) + "," + std::to_string(row.seed) + "," +
             fmt(row.total_optimal_probability) + "," +
             (row.top2_matches_optimal ? "1" : "0") + "\n";
      }
      emit_file("alpha_scan.csv", s);
      break;
    }
    default: {
      std::string s = csv_header(
          "qel-trials/1", "trial,seed,total_optimal_probability,final_model_loss,error");
      for (std::size_t i = 0; i < result.trials.size(); ++i) {
        const TrialReport& r = result.trials[i];
        s += std::to_string(i) + "," + std::to_string(r.seed) + ",";
        if (r.error.empty()) {
          s += fmt(r.total_optimal_probability) + "," + fmt(r.final_model_loss) + ",";
        } else {
          std::string msg = r.error;
          for (char& c : msg) {
            if (c == '"' || c == ',' || c == '\n') c = ';';
          }
          s += ",,\"" + msg + "\"";
        }
        s += "\n";
      }
      emit_file("trials.csv", s);
      break;
    }
  }
  return written;
}

// --- config I/O ---------------------------------------------------------------

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("config: unknown key '" + item.key() + "' in " +
                                  where);
    }
  }
}

OptimizerConfig optimizer_from_json(const json& j, OptimizerConfig base,
                                    const std::string& where) {
  check_keys(j, {"kind", "lr", "epochs", "beta1", "beta2", "epsilon", "history"},
             where);
  if (j.contains("kind")) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "adam") {
      base.kind = OptimizerKind::Adam;
    } else if (kind == "lbfgs") {
      base.kind = OptimizerKind::Lbfgs;
    } else {
      throw std::invalid_argument("config: optimizer kind must be adam or lbfgs");
    }
  }
  if (j.contains("lr")) base.lr = j.at("lr").get<double>();
  if (j.contains("epochs")) base.epochs = j.at("epochs").get<std::size_t>();
  if (j.contains("beta1")) base.beta1 = j.at("beta1").get<double>();
  if (j.contains("beta2")) base.beta2 = j.at("beta2").get<double>();
  if (j.contains("epsilon")) base.epsilon = j.at("epsilon").get<double>();
  if (j.contains("history")) base.history = j.at("history").get<std::size_t>();
  return base;
}

DatasetSpec dataset_from_json(const json& j, DatasetSpec base) {
  check_keys(j, {"size", "fraction", "grid_points", "exclude_window", "window"},
             "dataset");
  if (j.contains("size")) base.size = j.at("size").get<std::size_t>();
  if (j.contains("fraction")) base.fraction = j.at("fraction").get<double>();
  if (j.contains("grid_points")) base.grid_points = j.at("grid_points").get<std::size_t>();
  if (j.contains("exclude_window")) base.exclude_window = j.at("exclude_window").get<bool>();
  if (j.contains("window")) base.window = j.at("window").get<double>();
  return base;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: invalid JSON in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: root must be an object");
  check_keys(j,
             {"schema", "experiment", "n_qubits", "model_depth",
              "extremizer_depth", "model_optimizer", "model_optimizer_stage2",
              "extremizer_optimizer", "direction", "dataset", "trials", "seed",
              "alpha", "beta", "thresholds", "separation", "alpha_max",
              "alpha_step", "extremizer_x0", "out"},
             "the top level");
  if (j.contains("schema") && j.at("schema").get<std::string>() != "qel-config/1") {
    throw std::invalid_argument("config: unsupported schema");
  }
  if (!j.contains("experiment")) {
    throw std::invalid_argument("config: missing 'experiment'");
  }
  ExperimentConfig cfg =
      default_config(experiment_from_name(j.at("experiment").get<std::string>()));

  if (j.contains("n_qubits")) cfg.n_qubits = j.at("n_qubits").get<std::size_t>();
  if (j.contains("model_depth")) cfg.model_depth = j.at("model_depth").get<std::size_t>();
  if (j.contains("extremizer_depth")) {
    cfg.extremizer_depth = j.at("extremizer_depth").get<std::size_t>();
  }
  if (j.contains("model_optimizer")) {
    cfg.model_opt = optimizer_from_json(j.at("model_optimizer"), cfg.model_opt,
                                        "model_optimizer");
  }
  if (j.contains("model_optimizer_stage2")) {
    cfg.model_opt_stage2 = optimizer_from_json(
        j.at("model_optimizer_stage2"), cfg.model_opt_stage2,
        "model_optimizer_stage2");
  }
  if (j.contains("extremizer_optimizer")) {
    cfg.extremizer_opt = optimizer_from_json(
        j.at("extremizer_optimizer"), cfg.extremizer_opt, "extremizer_optimizer");
  }
  if (j.contains("direction")) {
    const std::string d = j.at("direction").get<std::string>();
    if (d == "maximize") {
      cfg.direction = Direction::Maximize;
    } else if (d == "minimize") {
      cfg.direction = Direction::Minimize;
    } else {
      throw std::invalid_argument("config: direction must be maximize or minimize");
    }
  }
  if (j.contains("dataset")) {
    cfg.dataset = dataset_from_json(j.at("dataset"), cfg.dataset);
  }
  if (j.contains("trials")) cfg.trials = j.at("trials").get<std::size_t>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
  if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
  if (j.contains("thresholds")) {
    cfg.thresholds = j.at("thresholds").get<std::vector<double>>();
  }
  if (j.contains("separation")) cfg.separation = j.at("separation").get<double>();
  if (j.contains("alpha_max")) cfg.alpha_max = j.at("alpha_max").get<double>();
  if (j.contains("alpha_step")) cfg.alpha_step = j.at("alpha_step").get<double>();
  if (j.contains("extremizer_x0")) {
    cfg.extremizer_x0 = j.at("extremizer_x0").get<double>();
  }
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();

  cfg.validate();
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema"] = "qel-config/1";
  j["experiment"] = experiment_name(cfg.experiment);
  j["n_qubits"] = cfg.n_qubits;
  j["model_depth"] = cfg.model_depth;
  if (cfg.extremizer_depth > 0) j["extremizer_depth"] = cfg.extremizer_depth;
  j["model_optimizer"] = optimizer_to_json(cfg.model_opt);
  if (cfg.model_opt_stage2.epochs > 0) {
    j["model_optimizer_stage2"] = optimizer_to_json(cfg.model_opt_stage2);
  }
  j["extremizer_optimizer"] = optimizer_to_json(cfg.extremizer_opt);
  j["direction"] =
      cfg.direction == Direction::Maximize ? "maximize" : "minimize";
  j["dataset"] = {{"size", cfg.dataset.size},
                  {"fraction", cfg.dataset.fraction},
                  {"grid_points", cfg.dataset.grid_points},
                  {"exclude_window", cfg.dataset.exclude_window},
                  {"window", cfg.dataset.window}};
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["thresholds"] = cfg.thresholds;
  if (cfg.experiment == Experiment::MaxCut ||
      cfg.experiment == Experiment::AlphaScan) {
    j["separation"] = cfg.separation;
  }
  if (cfg.experiment == Experiment::AlphaScan) {
    j["alpha_max"] = cfg.alpha_max;
    j["alpha_step"] = cfg.alpha_step;
  }
  j["extremizer_x0"] = cfg.extremizer_x0;
  j["out"] = cfg.out_dir;
  return j.dump(2) + "\n";
}

}  // namespace qel
