#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qel/rng.hpp"

namespace qel {

using Complex = std::complex<double>;

// Bit/qubit convention used across the library: qubit 0 is the MOST
// significant bit of the basis index, so the basis state |b0 b1 ... b(n-1)>
// has index b0*2^(n-1) + ... + b(n-1). Bitstrings are written qubit 0 first.

inline constexpr std::uint32_t kNoQubit = 0xffffffffu;

enum class GateKind : std::uint8_t { X, H, RX, RY, RZ, CNOT, CRY };

constexpr bool gate_has_angle(GateKind k) {
  return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ ||
         k == GateKind::CRY;
}

constexpr bool gate_is_controlled(GateKind k) {
  return k == GateKind::CNOT || k == GateKind::CRY;
}

const char* gate_name(GateKind k);

// One concrete gate. Rotation conventions (fixed; gradients depend on them):
//   RY(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
//   RX(t) = [[cos t/2, -i sin t/2], [-i sin t/2, cos t/2]]
//   RZ(t) = diag(e^{-i t/2}, e^{+i t/2})
// CNOT/CRY act on the target when the control qubit is |1>.
struct Gate {
  GateKind kind = GateKind::X;
  std::uint32_t target = 0;
  std::uint32_t control = kNoQubit;
  double angle = 0.0;

  static Gate x(std::size_t q) { return {GateKind::X, static_cast<std::uint32_t>(q), kNoQubit, 0.0}; }
  static Gate h(std::size_t q) { return {GateKind::H, static_cast<std::uint32_t>(q), kNoQubit, 0.0}; }
  static Gate rx(std::size_t q, double a) { return {GateKind::RX, static_cast<std::uint32_t>(q), kNoQubit, a}; }
  static Gate ry(std::size_t q, double a) { return {GateKind::RY, static_cast<std::uint32_t>(q), kNoQubit, a}; }
  static Gate rz(std::size_t q, double a) { return {GateKind::RZ, static_cast<std::uint32_t>(q), kNoQubit, a}; }
  static Gate cnot(std::size_t c, std::size_t t) {
    return {GateKind::CNOT, static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(c), 0.0};
  }
  static Gate cry(std::size_t c, std::size_t t, double a) {
    return {GateKind::CRY, static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(c), a};
  }

  // X/H/CNOT are self-inverse; rotations invert by negating the angle.
  Gate inverse() const {
    Gate g = *this;
    g.angle = -g.angle;
    return g;
  }
};

// Dense complex amplitude array over n qubits.
class StateVector {
public:
  // |0...0>; throws on n outside [1, 24] (24 qubits = 256 MiB of amplitudes)
  static StateVector zero(std::size_t n_qubits);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }

  std::span<const Complex> amplitudes() const { return amps_; }
  std::span<Complex> amplitudes() { return amps_; }

  Complex amplitude(std::uint64_t basis_index) const { return amps_[basis_index]; }

  double norm() const;

private:
  StateVector(std::size_t n, std::vector<Complex> amps)
      : n_qubits_(n), amps_(std::move(amps)) {}

  std::size_t n_qubits_ = 0;
  std::vector<Complex> amps_;
};

// Applies the gate's unitary on the target subspace in place. Throws if a
// qubit index is out of range or control == target.
void apply_gate(StateVector& state, const Gate& gate);
void apply_circuit(StateVector& state, std::span<const Gate> gates);

// <Sum_j Z_j> with sigma_Z|0> = +|0>; always in [-N, +N].
double expectation_z_sum(const StateVector& state);

// |amplitude_i|^2 for every basis index; sums to 1 on a normalized state.
std::vector<double> probabilities(const StateVector& state);

// Exact multinomial sampling of the Z-basis measurement distribution.
// Deterministic for a given rng state; throws on shots == 0.
std::map<std::string, std::uint64_t> sample(const StateVector& state,
                                            std::uint64_t shots, Rng& rng);

// (#zeros - #ones) of the n-bit basis index.
inline int magnetization(std::uint64_t basis_index, std::size_t n_qubits) {
  return static_cast<int>(n_qubits) - 2 * std::popcount(basis_index);
}

std::string to_bitstring(std::uint64_t basis_index, std::size_t n_qubits);
std::uint64_t from_bitstring(std::string_view bits);

// Tensor product of per-qubit RY(angle_q)|0>; used for product feature maps.
StateVector product_ry_state(std::span<const double> angles);

}  // namespace qel
