#include "qel/state_vector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qel {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

// qubit q <-> bit position (n-1-q) of the basis index
inline std::size_t bit_position(std::size_t n_qubits, std::uint32_t qubit) {
  return n_qubits - 1 - qubit;
}

void check_qubit(const StateVector& state, std::uint32_t q, const char* what) {
  if (q >= state.n_qubits()) {
    throw std::out_of_range(std::string(what) + " qubit index " +
                            std::to_string(q) + " out of range for " +
                            std::to_string(state.n_qubits()) + " qubits");
  }
}

// in-place butterfly |i0>,|i1> -> U [|i0>,|i1>] over the target stride,
// restricted to indices where the control bit (if any) is set
template <typename Body>
inline void for_each_pair(std::size_t dim, std::size_t stride, Body&& body) {
  const std::size_t block = stride << 1;
  for (std::size_t base = 0; base < dim; base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      body(base + off);
    }
  }
}

}  // namespace

const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::X: return "X";
    case GateKind::H: return "H";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CRY: return "CRY";
  }
  return "?";
}

StateVector StateVector::zero(std::size_t n_qubits) {
  if (n_qubits < 1 || n_qubits > 24) {
    throw std::invalid_argument("qubit count " + std::to_string(n_qubits) +
                                " outside supported range [1, 24]");
  }
  std::vector<Complex> amps(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  amps[0] = Complex{1.0, 0.0};
  return StateVector(n_qubits, std::move(amps));
}

double StateVector::norm() const {
  double s = 0.0;
  for (const Complex& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

void apply_gate(StateVector& state, const Gate& gate) {
  check_qubit(state, gate.target, "target");
  if (gate_is_controlled(gate.kind)) {
    check_qubit(state, gate.control, "control");
    if (gate.control == gate.target) {
      throw std::invalid_argument(std::string(gate_name(gate.kind)) +
                                  " control and target must differ");
    }
  }

  const std::size_t n = state.n_qubits();
  const std::size_t dim = state.dim();
  Complex* amps = state.amplitudes().data();
  const std::size_t stride = std::size_t{1} << bit_position(n, gate.target);
  const std::size_t cmask =
      gate_is_controlled(gate.kind)
          ? (std::size_t{1} << bit_position(n, gate.control))
          : 0;

  switch (gate.kind) {
    case GateKind::X:
      for_each_pair(dim, stride, [&](std::size_t i0) {
        std::swap(amps[i0], amps[i0 + stride]);
      });
      break;
    case GateKind::H:
      for_each_pair(dim, stride, [&](std::size_t i0) {
        const Complex a = amps[i0], b = amps[i0 + stride];
        amps[i0] = kInvSqrt2 * (a + b);
        amps[i0 + stride] = kInvSqrt2 * (a - b);
      });
      break;
    case GateKind::RX: {
      const double c = std::cos(0.5 * gate.angle);
      const double s = std::sin(0.5 * gate.angle);
      for_each_pair(dim, stride, [&](std::size_t i0) {
        const Complex a = amps[i0], b = amps[i0 + stride];
        amps[i0] = c * a + Complex{s * b.imag(), -s * b.real()};
        amps[i0 + stride] = Complex{s * a.imag(), -s * a.real()} + c * b;
      });
      break;
    }
    case GateKind::RY: {
      const double c = std::cos(0.5 * gate.angle);
      const double s = std::sin(0.5 * gate.angle);
      for_each_pair(dim, stride, [&](std::size_t i0) {
        const Complex a = amps[i0], b = amps[i0 + stride];
        amps[i0] = c * a - s * b;
        amps[i0 + stride] = s * a + c * b;
      });
      break;
    }
    case GateKind::RZ: {
      const Complex e0{std::cos(0.5 * gate.angle), -std::sin(0.5 * gate.angle)};
      const Complex e1 = std::conj(e0);
      for_each_pair(dim, stride, [&](std::size_t i0) {
        amps[i0] *= e0;
        amps[i0 + stride] *= e1;
      });
      break;
    }
    case GateKind::CNOT:
      for_each_pair(dim, stride, [&](std::size_t i0) {
        if (i0 & cmask) std::swap(amps[i0], amps[i0 + stride]);
      });
      break;
    case GateKind::CRY: {
      const double c = std::cos(0.5 * gate.angle);
      const double s = std::sin(0.5 * gate.angle);
      for_each_pair(dim, stride, [&](std::size_t i0) {
        if (i0 & cmask) {
          const Complex a = amps[i0], b = amps[i0 + stride];
          amps[i0] = c * a - s * b;
          amps[i0 + stride] = s * a + c * b;
        }
      });
      break;
    }
  }
}

void apply_circuit(StateVector& state, std::span<const Gate> gates) {
  for (const Gate& g : gates) apply_gate(state, g);
}

double expectation_z_sum(const StateVector& state) {
  const std::size_t n = state.n_qubits();
  double acc = 0.0;
  std::span<const Complex> amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    acc += std::norm(amps[i]) * magnetization(i, n);
  }
  return acc;
}

std::vector<double> probabilities(const StateVector& state) {
  std::vector<double> p(state.dim());
  std::span<const Complex> amps = state.amplitudes();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amps[i]);
  return p;
}

std::map<std::string, std::uint64_t> sample(const StateVector& state,
                                            std::uint64_t shots, Rng& rng) {
  if (shots == 0) {
    throw std::invalid_argument("sample requires shots >= 1");
  }
  const std::vector<double> p = probabilities(state);
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  cdf.back() = std::max(cdf.back(), 1.0);

  std::map<std::string, std::uint64_t> counts;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::uint64_t idx = static_cast<std::uint64_t>(
        std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
    ++counts[to_bitstring(idx, state.n_qubits())];
  }
  return counts;
}

std::string to_bitstring(std::uint64_t basis_index, std::size_t n_qubits) {
  std::string s(n_qubits, '0');
  for (std::size_t q = 0; q < n_qubits; ++q) {
    if (basis_index & (std::uint64_t{1} << (n_qubits - 1 - q))) s[q] = '1';
  }
  return s;
}

std::uint64_t from_bitstring(std::string_view bits) {
  std::uint64_t idx = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("bitstring contains non-binary symbol '" +
                                  std::string(1, c) + "'");
    }
    idx = (idx << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return idx;
}

StateVector product_ry_state(std::span<const double> angles) {
  StateVector state = StateVector::zero(angles.size());
  Complex* amps = state.amplitudes().data();
  const std::size_t n = angles.size();
  // amplitude of |b0 b1 .. b(n-1)> is prod_q (b_q ? sin : cos)(angle_q / 2)
  std::vector<double> c(n), s(n);
  for (std::size_t q = 0; q < n; ++q) {
    c[q] = std::cos(0.5 * angles[q]);
    s[q] = std::sin(0.5 * angles[q]);
  }
  for (std::size_t i = 0; i < state.dim(); ++i) {
    double prod = 1.0;
    for (std::size_t q = 0; q < n; ++q) {
      prod *= (i >> (n - 1 - q)) & 1 ? s[q] : c[q];
    }
    amps[i] = Complex{prod, 0.0};
  }
  return state;
}

}  // namespace qel
