#include "qel/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qel {

void Observable::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("observable needs n_qubits >= 1");
  if (!(alpha >= 1.0 && alpha <= 100.0)) {
    throw std::invalid_argument("alpha " + std::to_string(alpha) +
                                " outside [1, 100]");
  }
  if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
}

std::vector<double> random_theta(std::size_t count, Rng& rng) {
  std::vector<double> theta(count);
  for (double& t : theta) t = rng.uniform(-0.1, 0.1);
  return theta;
}

QuantumModel::QuantumModel(CircuitIR feature_map, CircuitIR ansatz,
                           Observable observable, std::vector<double> theta)
    : feature_map_(std::move(feature_map)),
      ansatz_(std::move(ansatz)),
      observable_(observable),
      theta_(std::move(theta)) {
  if (feature_map_.n_qubits() != ansatz_.n_qubits()) {
    throw std::invalid_argument("feature map and ansatz qubit counts differ");
  }
  if (feature_map_.has_variational()) {
    throw std::invalid_argument("feature map must not carry variational parameters");
  }
  if (ansatz_.has_features()) {
    throw std::invalid_argument("ansatz must not carry feature bindings");
  }
  if (theta_.size() != ansatz_.n_variational()) {
    throw std::invalid_argument("theta length " + std::to_string(theta_.size()) +
                                " does not match ansatz parameter count " +
                                std::to_string(ansatz_.n_variational()));
  }
  if (observable_.n_qubits != feature_map_.n_qubits()) {
    throw std::invalid_argument("observable qubit count mismatch");
  }
  observable_.validate();
}

void QuantumModel::set_theta(std::span<const double> theta) {
  if (frozen_) {
    throw std::logic_error("model is frozen; theta is immutable");
  }
  if (theta.size() != theta_.size()) {
    throw std::invalid_argument("set_theta: wrong parameter count");
  }
  theta_.assign(theta.begin(), theta.end());
}

StateVector QuantumModel::run(std::span<const double> features) const {
  StateVector state = StateVector::zero(n_qubits());
  const BindResult fm = feature_map_.bind(features, {});
  apply_circuit(state, fm.gates);
  const BindResult an = ansatz_.bind({}, theta_);
  apply_circuit(state, an.gates);
  return state;
}

double QuantumModel::evaluate(std::span<const double> features) const {
  return observable_.expectation(run(features));
}

double QuantumModel::raw_expectation(std::span<const double> features) const {
  return observable_.raw(run(features));
}

BindResult QuantumModel::bind_full(std::span<const double> features) const {
  BindResult out = feature_map_.bind(features, {});
  BindResult an = ansatz_.bind({}, theta_);
  const std::size_t offset = out.gates.size();
  out.gates.insert(out.gates.end(), an.gates.begin(), an.gates.end());
  out.variational_positions.resize(an.variational_positions.size());
  for (std::size_t k = 0; k < an.variational_positions.size(); ++k) {
    out.variational_positions[k] = an.variational_positions[k] + offset;
  }
  return out;
}

}  // namespace qel
