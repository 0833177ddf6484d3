#include "qel/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace qel {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

std::size_t worker_count() {
  if (const char* env = std::getenv("QEL_WORKERS")) {
    const long n = std::atol(env);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::pair<Dataset, TargetScaling> scale_targets(const Dataset& dataset) {
  if (dataset.samples.empty()) {
    throw std::invalid_argument("scale_targets: empty dataset");
  }
  double lo = dataset.samples.front().target;
  double hi = lo;
  for (const auto& s : dataset.samples) {
    lo = std::min(lo, s.target);
    hi = std::max(hi, s.target);
  }
  if (!(hi > lo)) {
    throw std::invalid_argument("scale_targets: all targets equal, range is degenerate");
  }
  TargetScaling scaling{lo, hi};
  Dataset out = dataset;
  for (auto& s : out.samples) s.target = scaling.apply(s.target);
  out.scaling = scaling;
  return {std::move(out), scaling};
}

void OdeSpec::validate() const {
  if (!rhs) throw std::invalid_argument("ode: missing rhs");
  if (!(lo < hi)) throw std::invalid_argument("ode: empty domain");
  if (boundary_x < lo || boundary_x > hi) {
    throw std::invalid_argument("ode: boundary point outside the domain");
  }
  if (collocation < 2) throw std::invalid_argument("ode: need at least 2 collocation points");
  if (derivative_margin < kFeatureEps) {
    throw std::invalid_argument("ode: derivative margin below the feature clamp");
  }
}

std::vector<double> OdeSpec::grid() const {
  std::vector<double> xs(collocation);
  for (std::size_t i = 0; i < collocation; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) /
                     static_cast<double>(collocation - 1);
  }
  return xs;
}

// --- MSE ----------------------------------------------------------------------

MseLoss::MseLoss(Dataset dataset, std::size_t workers)
    : dataset_(std::move(dataset)), workers_(std::max<std::size_t>(workers, 1)) {
  if (dataset_.samples.empty()) {
    throw std::invalid_argument("mse loss: empty dataset");
  }
}

double MseLoss::value(const QuantumModel& model) const {
  const std::size_t n = dataset_.samples.size();
  std::vector<double> sq(n);
  parallel_for(n, workers_, [&](std::size_t i) {
    const auto& s = dataset_.samples[i];
    const double d = model.evaluate(s.input) - s.target;
    sq[i] = d * d;
  });
  double acc = 0.0;
  for (double v : sq) acc += v;
  return acc / static_cast<double>(n);
}

GradientReport MseLoss::gradient(const QuantumModel& model) const {
  const std::size_t n = dataset_.samples.size();
  const std::size_t p = model.n_params();
  const BindResult an = model.ansatz().bind({}, model.theta());
  const ShiftGradientEngine engine(model.n_qubits(), an.gates,
                                   an.variational_positions,
                                   magnetization_diagonal(model.n_qubits()), n);
  const Observable& obs = model.observable();
  const double sf = obs.scale_factor();

  std::vector<std::vector<double>> per_point(n);
  std::vector<std::size_t> evals(n, 0);
  bool clamped = false;
  std::mutex clamped_mutex;

  parallel_for(n, workers_, [&](std::size_t i) {
    const auto& s = dataset_.samples[i];
    const BindResult fm = model.feature_map().bind(s.input, {});
    if (fm.clamped) {
      std::lock_guard<std::mutex> lock(clamped_mutex);
      clamped = true;
    }
    StateVector input = StateVector::zero(model.n_qubits());
    apply_circuit(input, fm.gates);

    const double f = obs.scale(engine.value(input));
    std::vector<double> g(p);
    engine.gradient(input, g, evals[i]);
    const double w = 2.0 * (f - s.target) * sf / static_cast<double>(n);
    for (double& v : g) v *= w;
    per_point[i] = std::move(g);
  });

  GradientReport report;
  report.clamped = clamped;
  report.values.assign(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    report.evaluations += evals[i];
    for (std::size_t k = 0; k < p; ++k) report.values[k] += per_point[i][k];
  }
  return report;
}

// --- ODE residual ---------------------------------------------------------------

OdeResidualLoss::OdeResidualLoss(OdeSpec ode, std::size_t workers)
    : ode_(std::move(ode)), workers_(std::max<std::size_t>(workers, 1)) {
  ode_.validate();
  grid_ = ode_.grid();
}

namespace {

// models without feature bindings are constant in x
double evaluate_at(const QuantumModel& model, double x) {
  if (model.n_features() == 0) return model.evaluate(std::span<const double>{});
  return model.evaluate(x);
}

// feature-shifted input states and chain factors for one grid point
struct PointInputs {
  std::vector<StateVector> shifted;  // 2 per feature gate: +, -
  std::vector<double> chain;         // d(phi_j)/dx
  StateVector base;

  PointInputs(const QuantumModel& model, double x, double margin = kFeatureEps)
      : base(StateVector::zero(model.n_qubits())) {
    const double cx =
        std::clamp(clamp_feature_grad(x), -1.0 + margin, 1.0 - margin);
    const BindResult fm =
        model.feature_map().bind(model.n_features() > 0
                                     ? std::span<const double>(&cx, 1)
                                     : std::span<const double>{},
                                 {});
    apply_circuit(base, fm.gates);
    const double root = std::sqrt(1.0 - cx * cx);
    for (const BoundFeatureGate& fg : fm.feature_gates) {
      if (fg.transform != binding::Transform::ChebyshevAngle) {
        throw std::invalid_argument(
            "ode residual loss requires a Chebyshev-bound feature map");
      }
      chain.push_back(-2.0 * static_cast<double>(fg.order) / root);
      for (int sign : {+1, -1}) {
        std::vector<Gate> gates = fm.gates;
        gates[fg.gate_pos].angle += sign * kHalfPi;
        StateVector s = StateVector::zero(model.n_qubits());
        apply_circuit(s, gates);
        shifted.push_back(std::move(s));
      }
    }
  }
};

}  // namespace

double OdeResidualLoss::value(const QuantumModel& model) const {
  const BindResult an = model.ansatz().bind({}, model.theta());
  const ShiftGradientEngine engine(model.n_qubits(), an.gates, {},
                                   magnetization_diagonal(model.n_qubits()));
  const double sf = model.observable().scale_factor();
  const std::size_t n = grid_.size();

  std::vector<double> sq(n);
  parallel_for(n, workers_, [&](std::size_t i) {
    const PointInputs in(model, grid_[i], ode_.derivative_margin);
    double df = 0.0;
    for (std::size_t j = 0; j < in.chain.size(); ++j) {
      const double ep = engine.value(in.shifted[2 * j]);
      const double em = engine.value(in.shifted[2 * j + 1]);
      df += 0.5 * (ep - em) * in.chain[j];
    }
    const double r = sf * df - ode_.rhs(grid_[i]);
    sq[i] = r * r;
  });
  double acc = 0.0;
  for (double v : sq) acc += v;
  acc /= static_cast<double>(n);

  const double fb = evaluate_at(model, ode_.boundary_x) - ode_.boundary_value;
  return acc + ode_.boundary_weight * fb * fb;
}

GradientReport OdeResidualLoss::gradient(const QuantumModel& model) const {
  const std::size_t p = model.n_params();
  const std::size_t n = grid_.size();
  const BindResult an = model.ansatz().bind({}, model.theta());
  const ShiftGradientEngine engine(
      model.n_qubits(), an.gates, an.variational_positions,
      magnetization_diagonal(model.n_qubits()),
      2 * n * std::max<std::size_t>(model.n_qubits(), 1));
  const double sf = model.observable().scale_factor();

  std::vector<std::vector<double>> per_point(n);
  std::vector<std::size_t> evals(n, 0);

  parallel_for(n, workers_, [&](std::size_t i) {
    const PointInputs in(model, grid_[i], ode_.derivative_margin);
    const std::size_t nj = in.chain.size();

    // residual r_i from the unshifted-theta values
    double df = 0.0;
    for (std::size_t j = 0; j < nj; ++j) {
      const double ep = engine.value(in.shifted[2 * j]);
      const double em = engine.value(in.shifted[2 * j + 1]);
      df += 0.5 * (ep - em) * in.chain[j];
    }
    const double r = sf * df - ode_.rhs(grid_[i]);

    // d(df/dx)/d(theta) via theta gradients at each feature shift
    std::vector<double> mixed(p, 0.0);
    std::vector<double> gp(p), gm(p);
    for (std::size_t j = 0; j < nj; ++j) {
      engine.gradient(in.shifted[2 * j], gp, evals[i]);
      engine.gradient(in.shifted[2 * j + 1], gm, evals[i]);
      for (std::size_t k = 0; k < p; ++k) {
        mixed[k] += 0.5 * (gp[k] - gm[k]) * in.chain[j];
      }
    }
    const double w = 2.0 * r * sf / static_cast<double>(n);
    for (double& v : mixed) v *= w;
    per_point[i] = std::move(mixed);
  });

  GradientReport report;
  report.values.assign(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    report.evaluations += evals[i];
    for (std::size_t k = 0; k < p; ++k) report.values[k] += per_point[i][k];
  }

  // boundary penalty term
  const PointInputs boundary(model, ode_.boundary_x);
  const double fb = model.observable().scale(engine.value(boundary.base)) -
                    ode_.boundary_value;
  std::vector<double> gb(p);
  engine.gradient(boundary.base, gb, report.evaluations);
  const double wb = 2.0 * ode_.boundary_weight * fb * sf;
  for (std::size_t k = 0; k < p; ++k) report.values[k] += wb * gb[k];
  return report;
}

double mse_loss(const QuantumModel& model, const Dataset& dataset) {
  return MseLoss(dataset).value(model);
}

double ode_residual_loss(const QuantumModel& model, const OdeSpec& ode) {
  return OdeResidualLoss(ode).value(model);
}

// --- fit -------------------------------------------------------------------------

TrainReport fit(QuantumModel& model, const Loss& loss,
                std::span<const OptimizerConfig> stages) {
  if (model.frozen()) {
    throw std::logic_error("fit: model is already frozen");
  }
  const auto start = std::chrono::steady_clock::now();

  TrainReport report;
  std::vector<double> theta(model.theta().begin(), model.theta().end());
  std::size_t epoch_index = 0;

  for (const OptimizerConfig& stage : stages) {
    if (!(stage.lr > 0.0)) throw std::invalid_argument("fit: lr must be > 0");
    AdamState adam(theta.size());
    LbfgsState lbfgs(theta.size(), stage.history);

    for (std::size_t e = 0; e < stage.epochs; ++e, ++epoch_index) {
      const double l = loss.value(model);
      if (!std::isfinite(l)) throw TrainingError("non-finite loss", epoch_index);
      report.loss_trajectory.push_back(l);

      GradientReport g = loss.gradient(model);
      if (!all_finite(g.values)) {
        throw TrainingError("non-finite gradient", epoch_index);
      }

      if (stage.kind == OptimizerKind::Lbfgs) {
        double norm2 = 0.0;
        for (double v : g.values) norm2 += v * v;
        if (norm2 == 0.0) break;  // stationary: nothing to update
        lbfgs.step(theta, g.values, stage.lr);
      } else {
        adam_step(adam, theta, g.values, stage);
      }
      model.set_theta(theta);
    }
  }

  report.final_loss = loss.value(model);
  if (report.loss_trajectory.empty()) {
    report.loss_trajectory.push_back(report.final_loss);
  }
  report.improved = report.final_loss <= report.loss_trajectory.front();
  report.final_theta = theta;
  model.freeze();

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

TrainReport fit(QuantumModel& model, const Loss& loss,
                const OptimizerConfig& config) {
  return fit(model, loss, std::span(&config, 1));
}

}  // namespace qel
