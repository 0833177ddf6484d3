#include "qel/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qel {

double clamp_feature(double x) { return std::clamp(x, -1.0, 1.0); }

double clamp_feature_grad(double x) {
  return std::clamp(x, -kFeatureClamp, kFeatureClamp);
}

CircuitIR::CircuitIR(std::size_t n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1) {
    throw std::invalid_argument("circuit needs at least one qubit");
  }
}

void CircuitIR::append(GateKind kind, std::size_t target, ParamBinding binding) {
  append_controlled(kind, kNoQubit, target, std::move(binding));
}

void CircuitIR::append_controlled(GateKind kind, std::size_t control,
                                  std::size_t target, ParamBinding binding) {
  if (target >= n_qubits_) {
    throw std::out_of_range("target qubit out of range");
  }
  if (gate_is_controlled(kind)) {
    if (control >= n_qubits_) throw std::out_of_range("control qubit out of range");
    if (control == target) {
      throw std::invalid_argument("control and target must differ");
    }
  } else if (control != kNoQubit) {
    throw std::invalid_argument("single-qubit gate cannot take a control");
  }

  const bool carries_angle = gate_has_angle(kind);
  if (std::holds_alternative<binding::Variational>(binding)) {
    if (!carries_angle) {
      throw std::invalid_argument("variational binding requires a rotation gate");
    }
    const auto& v = std::get<binding::Variational>(binding);
    if (v.index != n_variational_) {
      throw std::invalid_argument("variational indices must be appended in order");
    }
    ++n_variational_;
  } else if (std::holds_alternative<binding::Feature>(binding)) {
    if (!carries_angle) {
      throw std::invalid_argument("feature-angle binding requires a rotation gate");
    }
    const auto& f = std::get<binding::Feature>(binding);
    n_features_ = std::max(n_features_, f.feature + 1);
  } else if (std::holds_alternative<binding::FeatureBit>(binding)) {
    if (carries_angle) {
      throw std::invalid_argument("feature-bit binding applies to angle-free gates");
    }
    const auto& f = std::get<binding::FeatureBit>(binding);
    n_features_ = std::max(n_features_, f.feature + 1);
  }

  ops_.push_back(CircuitOp{kind, static_cast<std::uint32_t>(target),
                           gate_is_controlled(kind)
                               ? static_cast<std::uint32_t>(control)
                               : kNoQubit,
                           std::move(binding)});
}

BindResult CircuitIR::bind(std::span<const double> features,
                           std::span<const double> theta) const {
  if (features.size() != n_features_) {
    throw std::invalid_argument("expected " + std::to_string(n_features_) +
                                " feature value(s), got " +
                                std::to_string(features.size()));
  }
  if (theta.size() != n_variational_) {
    throw std::invalid_argument("expected " + std::to_string(n_variational_) +
                                " variational parameter(s), got " +
                                std::to_string(theta.size()));
  }

  BindResult out;
  out.gates.reserve(ops_.size());
  out.variational_positions.resize(n_variational_);

  for (const CircuitOp& op : ops_) {
    Gate gate{op.kind, op.target, op.control, 0.0};
    if (const auto* c = std::get_if<binding::Constant>(&op.binding)) {
      gate.angle = c->angle;
    } else if (const auto* f = std::get_if<binding::Feature>(&op.binding)) {
      const double x = features[f->feature];
      if (f->transform == binding::Transform::ChebyshevAngle) {
        const double clamped = clamp_feature(x);
        if (clamped != x) out.clamped = true;
        gate.angle = 2.0 * static_cast<double>(f->order) * std::acos(clamped);
      } else {
        gate.angle = x;
      }
      out.feature_gates.push_back(
          BoundFeatureGate{out.gates.size(), f->feature, f->transform, f->order});
    } else if (const auto* fb = std::get_if<binding::FeatureBit>(&op.binding)) {
      const double v = features[fb->feature];
      const double rounded = std::nearbyint(v);
      if (!(v == rounded) || v < 0.0) {
        throw std::invalid_argument("discrete feature value must be a "
                                    "non-negative integer");
      }
      const auto value = static_cast<std::uint64_t>(rounded);
      if (value >= (std::uint64_t{1} << fb->width)) {
        throw std::invalid_argument("discrete feature value " +
                                    std::to_string(value) + " needs more than " +
                                    std::to_string(fb->width) + " bits");
      }
      if (!((value >> (fb->width - 1 - fb->bit)) & 1)) {
        continue;  // bit unset: gate not emitted
      }
    } else {
      const auto& v = std::get<binding::Variational>(op.binding);
      gate.angle = theta[v.index];
      out.variational_positions[v.index] = out.gates.size();
    }
    out.gates.push_back(gate);
  }
  return out;
}

CircuitIR CircuitIR::baked(std::span<const double> theta) const {
  if (theta.size() != n_variational_) {
    throw std::invalid_argument("baked: wrong theta length");
  }
  CircuitIR out(n_qubits_);
  for (const CircuitOp& op : ops_) {
    ParamBinding b = op.binding;
    if (const auto* v = std::get_if<binding::Variational>(&b)) {
      b = binding::Constant{theta[v->index]};
    }
    if (op.control == kNoQubit) {
      out.append(op.kind, op.target, std::move(b));
    } else {
      out.append_controlled(op.kind, op.control, op.target, std::move(b));
    }
  }
  return out;
}

CircuitIR concat(const CircuitIR& lhs, const CircuitIR& rhs) {
  if (lhs.n_qubits_ != rhs.n_qubits_) {
    throw std::invalid_argument("concat: qubit counts differ");
  }
  CircuitIR out = lhs;
  for (const CircuitOp& op : rhs.ops_) {
    ParamBinding b = op.binding;
    if (auto* v = std::get_if<binding::Variational>(&b)) {
      v->index += lhs.n_variational_;
    }
    out.ops_.push_back(CircuitOp{op.kind, op.target, op.control, std::move(b)});
  }
  out.n_variational_ = lhs.n_variational_ + rhs.n_variational_;
  out.n_features_ = std::max(lhs.n_features_, rhs.n_features_);
  return out;
}

CircuitIR chebyshev_tower(std::size_t n_qubits) {
  CircuitIR circuit(n_qubits);
  for (std::size_t q = 0; q < n_qubits; ++q) {
    circuit.append(GateKind::RY, q,
                   binding::Feature{0, binding::Transform::ChebyshevAngle, q + 1});
  }
  return circuit;
}

CircuitIR digital_encoding(std::string_view bits) {
  const std::uint64_t value = from_bitstring(bits);  // validates symbols
  CircuitIR circuit(bits.size());
  for (std::size_t q = 0; q < bits.size(); ++q) {
    if ((value >> (bits.size() - 1 - q)) & 1) {
      circuit.append(GateKind::X, q);
    }
  }
  return circuit;
}

CircuitIR digital_feature_map(std::size_t n_qubits, std::size_t feature) {
  CircuitIR circuit(n_qubits);
  for (std::size_t q = 0; q < n_qubits; ++q) {
    circuit.append(GateKind::X, q, binding::FeatureBit{feature, q, n_qubits});
  }
  return circuit;
}

CircuitIR hardware_efficient_ansatz(std::size_t n_qubits, std::size_t depth) {
  if (depth < 1) throw std::invalid_argument("ansatz depth must be >= 1");
  CircuitIR circuit(n_qubits);
  std::size_t p = 0;
  for (std::size_t layer = 0; layer < depth; ++layer) {
    for (std::size_t q = 0; q < n_qubits; ++q) {
      circuit.append(GateKind::RY, q, binding::Variational{p++});
      circuit.append(GateKind::RZ, q, binding::Variational{p++});
    }
    for (std::size_t q = 0; q + 1 < n_qubits; ++q) {
      circuit.append_controlled(GateKind::CNOT, q, q + 1);
    }
  }
  return circuit;
}

CircuitIR mixed_feature_map(std::size_t n_cont, std::size_t n_disc) {
  if (n_cont < 1 || n_disc < 1) {
    throw std::invalid_argument("mixed feature map needs both sectors non-empty");
  }
  CircuitIR circuit(n_cont + n_disc);
  for (std::size_t q = 0; q < n_cont; ++q) {
    circuit.append(GateKind::RY, q,
                   binding::Feature{0, binding::Transform::ChebyshevAngle, q + 1});
  }
  for (std::size_t b = 0; b < n_disc; ++b) {
    circuit.append(GateKind::X, n_cont + b, binding::FeatureBit{1, b, n_disc});
  }
  return circuit;
}

}  // namespace qel
