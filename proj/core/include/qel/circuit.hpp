#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "qel/state_vector.hpp"

namespace qel {

// How a gate's parameter is resolved when the circuit is bound to concrete
// feature values and variational parameters.
namespace binding {

struct Constant {
  double angle = 0.0;
};

enum class Transform : std::uint8_t { Identity, ChebyshevAngle };

// Angle derived from a continuous feature. ChebyshevAngle maps
// x -> 2 * order * arccos(x) with x clamped into [-1 + eps, 1 - eps].
struct Feature {
  std::size_t feature = 0;
  Transform transform = Transform::Identity;
  std::size_t order = 0;
};

// Gate emitted only when the given bit of an integer-valued feature is set
// (bit 0 = most significant of a `width`-bit value). Used for digital
// encodings driven by a discrete feature.
struct FeatureBit {
  std::size_t feature = 0;
  std::size_t bit = 0;
  std::size_t width = 0;
};

struct Variational {
  std::size_t index = 0;
};

}  // namespace binding

using ParamBinding = std::variant<binding::Constant, binding::Feature,
                                  binding::FeatureBit, binding::Variational>;

// Continuous features are clamped into [-1, 1] before arccos when a circuit
// is bound for evaluation; differentiation paths pull |x| in by kFeatureEps
// so the chain-rule factor 1/sqrt(1 - x^2) stays finite.
inline constexpr double kFeatureEps = 1e-7;
inline constexpr double kFeatureClamp = 1.0 - kFeatureEps;
double clamp_feature(double x);       // [-1, 1]
double clamp_feature_grad(double x);  // [-1 + eps, 1 - eps]

struct CircuitOp {
  GateKind kind = GateKind::X;
  std::uint32_t target = 0;
  std::uint32_t control = kNoQubit;
  ParamBinding binding = binding::Constant{};
};

// Reference into a bound gate list for one resolved parameter slot.
struct BoundFeatureGate {
  std::size_t gate_pos = 0;   // index into BindResult::gates
  std::size_t feature = 0;
  binding::Transform transform = binding::Transform::Identity;
  std::size_t order = 0;
};

struct BindResult {
  std::vector<Gate> gates;
  // gate position of each variational parameter, indexed by theta slot
  std::vector<std::size_t> variational_positions;
  // angle-carrying feature-bound gates, in circuit order
  std::vector<BoundFeatureGate> feature_gates;
  bool clamped = false;  // a continuous feature was clamped during binding
};

// Ordered parameterized gate list. Immutable once built (append during
// construction only); binding resolves every parameter or throws.
class CircuitIR {
public:
  explicit CircuitIR(std::size_t n_qubits);

  void append(GateKind kind, std::size_t target,
              ParamBinding binding = binding::Constant{});
  void append_controlled(GateKind kind, std::size_t control, std::size_t target,
                         ParamBinding binding = binding::Constant{});

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t n_variational() const { return n_variational_; }
  std::size_t n_features() const { return n_features_; }
  std::size_t size() const { return ops_.size(); }
  const std::vector<CircuitOp>& ops() const { return ops_; }

  bool has_variational() const { return n_variational_ > 0; }
  bool has_features() const { return n_features_ > 0; }

  // Resolves every binding. Throws if features/theta have the wrong arity,
  // if a discrete feature is not a non-negative integer below 2^width, or if
  // a variational slot is missing.
  BindResult bind(std::span<const double> features,
                  std::span<const double> theta) const;

  // Copy with every Variational binding replaced by the given constant angle.
  CircuitIR baked(std::span<const double> theta) const;

  // Concatenation; both sides must have the same qubit count. Variational
  // indices of `rhs` are shifted past those of `lhs`.
  friend CircuitIR concat(const CircuitIR& lhs, const CircuitIR& rhs);

private:
  std::size_t n_qubits_ = 0;
  std::vector<CircuitOp> ops_;
  std::size_t n_variational_ = 0;
  std::size_t n_features_ = 0;
};

// --- builders ---------------------------------------------------------------

// One RY per qubit with angle 2*j*arccos(x), j = 1..n (qubit order top down);
// with an identity ansatz the raw model output is Sum_j T_{2j}(x).
CircuitIR chebyshev_tower(std::size_t n_qubits);

// Constant circuit mapping |0..0> to the basis state of `bits` via X gates.
CircuitIR digital_encoding(std::string_view bits);

// Digital encoding driven by feature `feature` interpreted as an integer in
// [0, 2^n_qubits); qubit 0 carries the most significant bit.
CircuitIR digital_feature_map(std::size_t n_qubits, std::size_t feature = 0);

// Layered variational ansatz: per layer, RY then RZ on every qubit (2n fresh
// parameters) followed by a CNOT chain q -> q+1. Parameters are laid out
// layer-major, qubit-major, RY before RZ; total count 2 * n * depth.
CircuitIR hardware_efficient_ansatz(std::size_t n_qubits, std::size_t depth);

// Chebyshev tower on the first n_cont qubits (feature 0) plus digital
// encoding of feature 1 on the last n_disc qubits.
CircuitIR mixed_feature_map(std::size_t n_cont, std::size_t n_disc);

}  // namespace qel
