#include "qel/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qel/gradients.hpp"
#include "qel/optimize.hpp"

namespace qel {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = 0.5 * kPi;

bool is_better(Direction d, double candidate, double incumbent) {
  return d == Direction::Maximize ? candidate > incumbent
                                  : candidate < incumbent;
}

void require_frozen(const QuantumModel& model, const char* op) {
  if (!model.frozen()) {
    throw std::logic_error(std::string(op) + ": model must be frozen first");
  }
}

// scaled model value on every basis state, via digital encoding
std::vector<double> basis_values(const QuantumModel& model) {
  const std::size_t n = model.n_qubits();
  const BindResult an = model.ansatz().bind({}, model.theta());
  const Observable& obs = model.observable();
  std::vector<double> d(std::size_t{1} << n);
  for (std::uint64_t z = 0; z < d.size(); ++z) {
    const CircuitIR enc = digital_encoding(to_bitstring(z, n));
    StateVector state = StateVector::zero(n);
    apply_circuit(state, enc.bind({}, {}).gates);
    apply_circuit(state, an.gates);
    d[z] = obs.expectation(state);
  }
  return d;
}

}  // namespace

void ExtremizeConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("extremizer lr must be > 0");
  if (epochs < 1) throw std::invalid_argument("extremizer epochs must be >= 1");
}

ExtremalResult extremize_continuous(const QuantumModel& model,
                                    const ExtremizeConfig& config) {
  require_frozen(model, "extremize_continuous");
  config.validate();
  const double lo = std::max(config.lo, -kFeatureClamp);
  const double hi = std::min(config.hi, kFeatureClamp);
  if (!(lo < hi)) throw std::invalid_argument("empty extremization window");

  ExtremalResult result;
  double x = std::clamp(config.x0, lo, hi);
  result.clamped = x != config.x0;

  double value = model.evaluate(x);
  result.trajectory.push_back(value);
  result.best_input = x;
  result.best_value = value;

  OptimizerConfig adam_cfg;
  adam_cfg.lr = config.lr;
  AdamState adam(1);

  for (std::size_t e = 0; e < config.epochs; ++e) {
    const InputGradient g = grad_x(model, x);
    if (!std::isfinite(g.value)) {
      throw TrainingError("non-finite extremizer gradient", e);
    }
    // ADAM minimizes; ascend by feeding the negated gradient
    double signed_grad =
        config.direction == Direction::Maximize ? -g.value : g.value;
    adam_step(adam, std::span(&x, 1), std::span(&signed_grad, 1), adam_cfg);
    const double clamped = std::clamp(x, lo, hi);
    if (clamped != x) result.clamped = true;
    x = clamped;

    value = model.evaluate(x);
    result.trajectory.push_back(value);
    if (is_better(config.direction, value, result.best_value)) {
      result.best_value = value;
      result.best_input = x;
    }
  }
  return result;
}

double discrete_objective(const QuantumModel& model,
                          const ExtremizerFeatureMap& efm) {
  require_frozen(model, "discrete_objective");
  const std::vector<double> d = basis_values(model);
  StateVector state = StateVector::zero(efm.circuit.n_qubits());
  apply_circuit(state, efm.circuit.bind({}, efm.chi).gates);
  std::span<const Complex> amps = state.amplitudes();
  double acc = 0.0;
  for (std::size_t z = 0; z < d.size(); ++z) acc += std::norm(amps[z]) * d[z];
  return acc;
}

DiscreteExtremizerResult train_extremizer_discrete(
    const QuantumModel& model, const ExtremizeConfig& config) {
  require_frozen(model, "train_extremizer_discrete");
  config.validate();

  const std::size_t n = model.n_qubits();
  const std::size_t depth = config.depth > 0 ? config.depth : n * n;
  CircuitIR circuit = hardware_efficient_ansatz(n, depth);

  Rng rng(config.seed);
  std::vector<double> chi = random_theta(circuit.n_variational(), rng);

  const std::vector<double> d = basis_values(model);
  const StateVector zero = StateVector::zero(n);

  auto objective_of = [&](std::span<const double> params) {
    StateVector state = zero;
    apply_circuit(state, circuit.bind({}, params).gates);
    std::span<const Complex> amps = state.amplitudes();
    double acc = 0.0;
    for (std::size_t z = 0; z < d.size(); ++z) acc += std::norm(amps[z]) * d[z];
    return acc;
  };

  DiscreteExtremizerResult result{{circuit, chi}, {}};
  double best = objective_of(chi);
  result.trajectory.push_back(best);
  result.map.chi = chi;

  OptimizerConfig adam_cfg;
  adam_cfg.lr = config.lr;
  AdamState adam(chi.size());
  std::vector<double> grad(chi.size());

  for (std::size_t e = 0; e < config.epochs; ++e) {
    const BindResult bound = circuit.bind({}, chi);
    ShiftGradientEngine engine(n, bound.gates, bound.variational_positions, d);
    std::size_t evals = 0;
    engine.gradient(zero, grad, evals);
    if (config.direction == Direction::Maximize) {
      for (double& g : grad) g = -g;
    }
    adam_step(adam, chi, grad, adam_cfg);

    const double value = objective_of(chi);
    result.trajectory.push_back(value);
    if (is_better(config.direction, value, best)) {
      best = value;
      result.map.chi = chi;
    }
  }
  return result;
}

ExtremalResult sample_extremizer(const ExtremizerFeatureMap& efm,
                                 std::size_t top_k) {
  const std::size_t n = efm.circuit.n_qubits();
  StateVector state = StateVector::zero(n);
  apply_circuit(state, efm.circuit.bind({}, efm.chi).gates);
  const std::vector<double> p = probabilities(state);

  ExtremalResult result;
  std::vector<std::pair<std::string, double>> entries;
  entries.reserve(p.size());
  for (std::size_t z = 0; z < p.size(); ++z) {
    const std::string bits = to_bitstring(z, n);
    result.distribution.emplace(bits, p[z]);
    entries.emplace_back(bits, p[z]);
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;  // deterministic tie-break
  });
  entries.resize(std::min(top_k, entries.size()));
  result.top_candidates = std::move(entries);
  return result;
}

double total_optimal_probability(const ExtremalResult& result,
                                 std::span<const std::string> optimal_set) {
  double acc = 0.0;
  for (const std::string& bits : optimal_set) {
    const auto it = result.distribution.find(bits);
    if (it != result.distribution.end()) acc += it->second;
  }
  return acc;
}

namespace {

// Feature-map layout required by the mixed extremizer: a Chebyshev tower
// followed by a two-qubit digital sector.
struct MixedLayout {
  std::vector<std::pair<std::size_t, std::size_t>> tower;  // (qubit, order)
  std::size_t qa = 0;  // first digital qubit
  std::size_t qb = 0;

  explicit MixedLayout(const QuantumModel& model) {
    const CircuitIR& fm = model.feature_map();
    std::size_t n_disc = 0;
    for (const CircuitOp& op : fm.ops()) {
      if (const auto* f = std::get_if<binding::Feature>(&op.binding)) {
        if (op.kind != GateKind::RY ||
            f->transform != binding::Transform::ChebyshevAngle) {
          throw std::invalid_argument("mixed extremizer: unsupported feature map");
        }
        tower.emplace_back(op.target, f->order);
      } else if (std::holds_alternative<binding::FeatureBit>(op.binding)) {
        ++n_disc;
      }
    }
    if (tower.empty() || n_disc != 2) {
      throw std::invalid_argument(
          "mixed extremizer expects a Chebyshev tower plus a 2-qubit digital sector");
    }
    qa = fm.n_qubits() - 2;
    qb = fm.n_qubits() - 1;
  }

  // tower driven by x plus the real-amplitude tree RY(a), CRY(b) on
  // control=1 and CRY(c) on control=0
  std::vector<Gate> gates(const std::array<double, 4>& p) const {
    std::vector<Gate> out;
    out.reserve(tower.size() + 5);
    const double cx = clamp_feature_grad(p[0]);
    for (const auto& [q, order] : tower) {
      out.push_back(Gate::ry(q, 2.0 * static_cast<double>(order) * std::acos(cx)));
    }
    out.push_back(Gate::ry(qa, p[1]));
    out.push_back(Gate::cry(qa, qb, p[2]));
    out.push_back(Gate::x(qa));
    out.push_back(Gate::cry(qa, qb, p[3]));
    out.push_back(Gate::x(qa));
    return out;
  }
};

}  // namespace

StateVector mixed_extremizer_state(const QuantumModel& model, double x,
                                   double a, double b, double c) {
  const MixedLayout layout(model);
  StateVector state = StateVector::zero(model.n_qubits());
  apply_circuit(state, layout.gates({x, a, b, c}));
  return state;
}

ExtremalResult extremize_mixed(const QuantumModel& model,
                               const ExtremizeConfig& config) {
  require_frozen(model, "extremize_mixed");
  config.validate();

  const MixedLayout layout(model);
  const std::size_t n = model.n_qubits();
  const auto& tower = layout.tower;

  // extremizer parameters: x plus the real-amplitude tree angles (a, b, c);
  // tree at (pi/2, pi/2, pi/2) is the uniform superposition over the sector
  std::array<double, 4> params{std::clamp(config.x0, -kFeatureClamp, kFeatureClamp),
                               kHalfPi, kHalfPi, kHalfPi};

  const BindResult an = model.ansatz().bind({}, model.theta());
  const std::vector<double> mag = magnetization_diagonal(n);
  const Observable& obs = model.observable();

  // gate list template; tower angles and tree angles are rewritten per epoch
  auto build_gates = [&](const std::array<double, 4>& p) {
    std::vector<Gate> gates = layout.gates(p);
    gates.insert(gates.end(), an.gates.begin(), an.gates.end());
    return gates;
  };
  const std::size_t n_ext_gates = tower.size() + 5;

  auto objective_of = [&](const std::array<double, 4>& p) {
    StateVector state = StateVector::zero(n);
    const auto gates = build_gates(p);
    apply_circuit(state, gates);
    return obs.expectation(state);
  };

  ExtremalResult result;
  double best = objective_of(params);
  std::array<double, 4> best_params = params;
  result.trajectory.push_back(best);

  OptimizerConfig adam_cfg;
  adam_cfg.lr = config.lr;
  AdamState adam(4);
  const StateVector zero = StateVector::zero(n);

  // shift positions: tower gates, RY(a), CRY(b), CRY(c)
  std::vector<std::size_t> positions;
  for (std::size_t j = 0; j < tower.size(); ++j) positions.push_back(j);
  positions.push_back(tower.size());      // a
  positions.push_back(tower.size() + 1);  // b
  positions.push_back(tower.size() + 3);  // c

  for (std::size_t e = 0; e < config.epochs; ++e) {
    const auto gates = build_gates(params);
    ShiftGradientEngine engine(n, gates, positions, mag);
    std::vector<double> dangle(positions.size());
    std::size_t evals = 0;
    engine.gradient(zero, dangle, evals);

    const double cx = clamp_feature_grad(params[0]);
    const double root = std::sqrt(1.0 - cx * cx);
    std::array<double, 4> grad{};
    for (std::size_t j = 0; j < tower.size(); ++j) {
      grad[0] += dangle[j] * (-2.0 * static_cast<double>(tower[j].second) / root);
    }
    grad[1] = dangle[tower.size()];
    grad[2] = dangle[tower.size() + 1];
    grad[3] = dangle[tower.size() + 2];
    const double sf = obs.scale_factor();
    for (double& g : grad) {
      g *= sf;
      if (config.direction == Direction::Maximize) g = -g;
    }
    adam_step(adam, params, grad, adam_cfg);
    const double clamped = std::clamp(params[0], -kFeatureClamp, kFeatureClamp);
    if (clamped != params[0]) result.clamped = true;
    params[0] = clamped;

    const double value = objective_of(params);
    result.trajectory.push_back(value);
    if (is_better(config.direction, value, best)) {
      best = value;
      best_params = params;
    }
  }

  result.best_input = best_params[0];
  result.best_value = best;

  // 2-qubit marginal of the extremizer state (ansatz removed) at the optimum
  StateVector ext = StateVector::zero(n);
  const auto best_gates = build_gates(best_params);
  apply_circuit(ext, std::span(best_gates).first(n_ext_gates));
  const std::vector<double> p = probabilities(ext);
  std::array<double, 4> marginal{};
  for (std::size_t i = 0; i < p.size(); ++i) marginal[i & 3] += p[i];
  for (std::size_t code = 0; code < 4; ++code) {
    result.distribution.emplace(to_bitstring(code, 2), marginal[code]);
  }
  std::vector<std::pair<std::string, double>> entries(
      result.distribution.begin(), result.distribution.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  result.top_candidates = std::move(entries);
  return result;
}

}  // namespace qel
