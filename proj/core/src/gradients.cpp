#include "qel/gradients.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace qel {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

std::array<Complex, 4> gate_matrix(GateKind kind, double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  switch (kind) {
    case GateKind::X:
    case GateKind::CNOT:
      return {Complex{0, 0}, Complex{1, 0}, Complex{1, 0}, Complex{0, 0}};
    case GateKind::H: {
      const double h = 0.70710678118654752440;
      return {Complex{h, 0}, Complex{h, 0}, Complex{h, 0}, Complex{-h, 0}};
    }
    case GateKind::RX:
      return {Complex{c, 0}, Complex{0, -s}, Complex{0, -s}, Complex{c, 0}};
    case GateKind::RY:
    case GateKind::CRY:
      return {Complex{c, 0}, Complex{-s, 0}, Complex{s, 0}, Complex{c, 0}};
    case GateKind::RZ:
      return {Complex{c, -s}, Complex{0, 0}, Complex{0, 0}, Complex{c, s}};
  }
  return {};
}

inline std::size_t bit_position(std::size_t n, std::uint32_t q) {
  return n - 1 - q;
}

// A <- G† A G for a (controlled) single-qubit gate; A row-major dim x dim.
void conjugate_observable(std::vector<Complex>& a, std::size_t n_qubits,
                          const Gate& gate) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  const std::size_t stride = std::size_t{1} << bit_position(n_qubits, gate.target);
  const std::size_t cmask =
      gate_is_controlled(gate.kind)
          ? (std::size_t{1} << bit_position(n_qubits, gate.control))
          : 0;
  const std::array<Complex, 4> u = gate_matrix(gate.kind, gate.angle);
  const std::size_t block = stride << 1;

  // right-multiply: rows of A, butterfly over column pairs
  for (std::size_t r = 0; r < dim; ++r) {
    Complex* row = a.data() + r * dim;
    for (std::size_t base = 0; base < dim; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t c0 = base + off;
        if (cmask && !(c0 & cmask)) continue;
        const Complex b0 = row[c0], b1 = row[c0 + stride];
        row[c0] = b0 * u[0] + b1 * u[2];
        row[c0 + stride] = b0 * u[1] + b1 * u[3];
      }
    }
  }
  // left-multiply by G†: butterfly over row pairs
  const Complex u00 = std::conj(u[0]), u10 = std::conj(u[2]);
  const Complex u01 = std::conj(u[1]), u11 = std::conj(u[3]);
  for (std::size_t base = 0; base < dim; base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      const std::size_t r0 = base + off;
      if (cmask && !(r0 & cmask)) continue;
      Complex* row0 = a.data() + r0 * dim;
      Complex* row1 = a.data() + (r0 + stride) * dim;
      for (std::size_t c = 0; c < dim; ++c) {
        const Complex b0 = row0[c], b1 = row1[c];
        row0[c] = u00 * b0 + u10 * b1;
        row1[c] = u01 * b0 + u11 * b1;
      }
    }
  }
}

struct ShiftTerm {
  double shift;
  double weight;
};

// parameter-shift decomposition of d/d(angle) for each rotation kind
std::span<const ShiftTerm> shift_terms(GateKind kind) {
  static constexpr std::array<ShiftTerm, 2> rotation{{
      {kHalfPi, 0.5},
      {-kHalfPi, -0.5},
  }};
  static constexpr std::array<ShiftTerm, 4> controlled{{
      {kHalfPi, kCryShiftC1},
      {-kHalfPi, -kCryShiftC1},
      {3.0 * kHalfPi, -kCryShiftC2},
      {-3.0 * kHalfPi, kCryShiftC2},
  }};
  switch (kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
      return rotation;
    case GateKind::CRY:
      return controlled;
    default:
      throw std::invalid_argument(
          std::string("gate kind ") + gate_name(kind) +
          " cannot carry a shifted parameter");
  }
}

}  // namespace

std::vector<double> magnetization_diagonal(std::size_t n_qubits) {
  std::vector<double> d(std::size_t{1} << n_qubits);
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = magnetization(i, n_qubits);
  }
  return d;
}

ShiftGradientEngine::ShiftGradientEngine(std::size_t n_qubits,
                                         std::vector<Gate> gates,
                                         std::vector<std::size_t> positions,
                                         std::vector<double> observable_diagonal,
                                         std::size_t reuse_hint)
    : n_qubits_(n_qubits),
      dim_(std::size_t{1} << n_qubits),
      gates_(std::move(gates)),
      positions_(std::move(positions)),
      diag_(std::move(observable_diagonal)) {
  if (diag_.size() != dim_) {
    throw std::invalid_argument("observable diagonal has wrong length");
  }
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    if (positions_[k] >= gates_.size()) {
      throw std::out_of_range("shift position outside the gate list");
    }
    if (k > 0 && positions_[k] <= positions_[k - 1]) {
      throw std::invalid_argument("shift positions must be strictly increasing");
    }
    shift_terms(gates_[positions_[k]].kind);  // validates the kind
  }

  // cost model (units of complex mults): the suffix sweep conjugates dim x dim
  // matrices once, after which every shifted evaluation is a dense sandwich;
  // the direct path re-simulates the circuit per shifted evaluation.
  // reuse_hint == 0 disables the cache outright.
  if (reuse_hint == 0) return;
  const std::size_t reuse = reuse_hint;
  const std::size_t m = gates_.size();
  const std::size_t shifts = 2 * positions_.size();
  const double cached_cost =
      static_cast<double>(m) * dim_ * dim_ +
      static_cast<double>(reuse) * (shifts * dim_ * dim_ + m * dim_);
  const double direct_cost =
      static_cast<double>(reuse) * shifts * m * dim_;
  const std::size_t matrix_bytes = dim_ * dim_ * sizeof(Complex);
  const bool fits =
      !positions_.empty() &&
      matrix_bytes <= kShiftCacheBudget / std::max<std::size_t>(positions_.size(), 1);
  cached_ = fits && cached_cost < direct_cost;
  if (!cached_) return;

  // backward sweep: A starts as diag(D) and absorbs gates from the end;
  // when the sweep reaches a shifted position its suffix observable is A.
  suffix_.assign(positions_.size(), {});
  std::vector<Complex> a(dim_ * dim_, Complex{0, 0});
  for (std::size_t i = 0; i < dim_; ++i) a[i * dim_ + i] = Complex{diag_[i], 0};

  std::ptrdiff_t next = static_cast<std::ptrdiff_t>(positions_.size()) - 1;
  for (std::size_t i = gates_.size(); i-- > 0;) {
    if (next >= 0 && positions_[static_cast<std::size_t>(next)] == i) {
      suffix_[static_cast<std::size_t>(next)] = a;
      --next;
    }
    conjugate_observable(a, n_qubits_, gates_[i]);
  }
}

double ShiftGradientEngine::value(const StateVector& input) const {
  StateVector state = input;
  apply_circuit(state, gates_);
  std::span<const Complex> amps = state.amplitudes();
  double acc = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) acc += diag_[i] * std::norm(amps[i]);
  return acc;
}

double ShiftGradientEngine::sandwich(const StateVector& prefix,
                                     const Gate& shifted,
                                     const std::vector<Complex>& a) const {
  StateVector chi = prefix;
  apply_gate(chi, shifted);
  std::span<const Complex> v = chi.amplitudes();
  double acc = 0.0;
  for (std::size_t r = 0; r < dim_; ++r) {
    const Complex* row = a.data() + r * dim_;
    Complex dot{0, 0};
    for (std::size_t c = 0; c < dim_; ++c) dot += row[c] * v[c];
    acc += (std::conj(v[r]) * dot).real();
  }
  return acc;
}

double ShiftGradientEngine::shifted_value(const StateVector& input,
                                          std::size_t position,
                                          double shift) const {
  StateVector state = input;
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    Gate g = gates_[i];
    if (i == position) g.angle += shift;
    apply_gate(state, g);
  }
  std::span<const Complex> amps = state.amplitudes();
  double acc = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) acc += diag_[i] * std::norm(amps[i]);
  return acc;
}

void ShiftGradientEngine::gradient(const StateVector& input,
                                   std::span<double> out,
                                   std::size_t& evaluations) const {
  if (out.size() != positions_.size()) {
    throw std::invalid_argument("gradient output span has wrong length");
  }
  if (input.n_qubits() != n_qubits_) {
    throw std::invalid_argument("input state has wrong qubit count");
  }

  if (!cached_) {
    for (std::size_t k = 0; k < positions_.size(); ++k) {
      const std::size_t pos = positions_[k];
      double acc = 0.0;
      for (const ShiftTerm& term : shift_terms(gates_[pos].kind)) {
        acc += term.weight * shifted_value(input, pos, term.shift);
        ++evaluations;
      }
      out[k] = acc;
    }
    return;
  }

  // forward pass snapshotting the state right before each shifted gate
  StateVector state = input;
  std::vector<StateVector> snapshots;
  snapshots.reserve(positions_.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    if (next < positions_.size() && positions_[next] == i) {
      snapshots.push_back(state);
      ++next;
    }
    apply_gate(state, gates_[i]);
  }

  for (std::size_t k = 0; k < positions_.size(); ++k) {
    const Gate& g = gates_[positions_[k]];
    double acc = 0.0;
    for (const ShiftTerm& term : shift_terms(g.kind)) {
      Gate shifted = g;
      shifted.angle += term.shift;
      acc += term.weight * sandwich(snapshots[k], shifted, suffix_[k]);
      ++evaluations;
    }
    out[k] = acc;
  }
}

// --- public operations -------------------------------------------------------

GradientReport grad_theta(const QuantumModel& model,
                          std::span<const double> features) {
  const BindResult bound = model.bind_full(features);
  ShiftGradientEngine engine(model.n_qubits(), bound.gates,
                             bound.variational_positions,
                             magnetization_diagonal(model.n_qubits()));
  GradientReport report;
  report.clamped = bound.clamped;
  report.values.resize(model.n_params());
  engine.gradient(StateVector::zero(model.n_qubits()), report.values,
                  report.evaluations);
  const double sf = model.observable().scale_factor();
  for (double& v : report.values) v *= sf;
  return report;
}

InputGradient grad_x(const QuantumModel& model, double x) {
  const double clamped_x = clamp_feature_grad(x);
  InputGradient result;
  result.clamped = clamped_x != x;

  const BindResult bound = model.bind_full(std::span(&clamped_x, 1));
  std::vector<std::size_t> positions;
  std::vector<double> chain;  // d(phi_j)/dx
  const double root = std::sqrt(1.0 - clamped_x * clamped_x);
  for (const BoundFeatureGate& fg : bound.feature_gates) {
    if (fg.transform != binding::Transform::ChebyshevAngle) {
      throw std::invalid_argument(
          "grad_x requires a Chebyshev-bound feature map");
    }
    positions.push_back(fg.gate_pos);
    chain.push_back(-2.0 * static_cast<double>(fg.order) / root);
  }
  if (positions.empty()) return result;  // no x dependence

  ShiftGradientEngine engine(model.n_qubits(), bound.gates, positions,
                             magnetization_diagonal(model.n_qubits()));
  std::vector<double> dphi(positions.size());
  engine.gradient(StateVector::zero(model.n_qubits()), dphi,
                  result.evaluations);

  double acc = 0.0;
  for (std::size_t j = 0; j < dphi.size(); ++j) acc += dphi[j] * chain[j];
  result.value = acc * model.observable().scale_factor();
  return result;
}

GradientReport grad_theta_of_df_dx(const QuantumModel& model, double x) {
  const double clamped_x = clamp_feature_grad(x);
  GradientReport report;
  report.clamped = clamped_x != x;
  report.values.assign(model.n_params(), 0.0);

  const BindResult fm = model.feature_map().bind(std::span(&clamped_x, 1), {});
  const BindResult an = model.ansatz().bind({}, model.theta());
  ShiftGradientEngine engine(model.n_qubits(), an.gates,
                             an.variational_positions,
                             magnetization_diagonal(model.n_qubits()),
                             2 * fm.feature_gates.size());

  const double root = std::sqrt(1.0 - clamped_x * clamped_x);
  std::vector<double> plus(model.n_params());
  std::vector<double> minus(model.n_params());

  for (const BoundFeatureGate& fg : fm.feature_gates) {
    if (fg.transform != binding::Transform::ChebyshevAngle) {
      throw std::invalid_argument(
          "grad_theta_of_df_dx requires a Chebyshev-bound feature map");
    }
    const double chain = -2.0 * static_cast<double>(fg.order) / root;
    for (int sign : {+1, -1}) {
      std::vector<Gate> shifted = fm.gates;
      shifted[fg.gate_pos].angle += sign * kHalfPi;
      StateVector input = StateVector::zero(model.n_qubits());
      apply_circuit(input, shifted);
      engine.gradient(input, sign > 0 ? std::span<double>(plus)
                                      : std::span<double>(minus),
                      report.evaluations);
    }
    for (std::size_t k = 0; k < report.values.size(); ++k) {
      report.values[k] += 0.5 * (plus[k] - minus[k]) * chain;
    }
  }

  const double sf = model.observable().scale_factor();
  for (double& v : report.values) v *= sf;
  return report;
}

}  // namespace qel
