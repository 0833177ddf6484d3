#pragma once

#include <span>
#include <vector>

#include "qel/circuit.hpp"
#include "qel/observable.hpp"
#include "qel/rng.hpp"
#include "qel/state_vector.hpp"

namespace qel {

// near-identity start: i.i.d. uniform on [-0.1, 0.1] radians
std::vector<double> random_theta(std::size_t count, Rng& rng);

// Feature map + variational ansatz + scaled Z-sum observable. The feature map
// carries no variational parameters and the ansatz no feature bindings.
// Once frozen, theta can no longer be modified; extremization operates on a
// frozen model and never touches it.
class QuantumModel {
public:
  QuantumModel(CircuitIR feature_map, CircuitIR ansatz, Observable observable,
               std::vector<double> theta);

  std::size_t n_qubits() const { return feature_map_.n_qubits(); }
  std::size_t n_params() const { return theta_.size(); }
  std::size_t n_features() const { return feature_map_.n_features(); }

  const CircuitIR& feature_map() const { return feature_map_; }
  const CircuitIR& ansatz() const { return ansatz_; }
  const Observable& observable() const { return observable_; }

  std::span<const double> theta() const { return theta_; }
  void set_theta(std::span<const double> theta);  // throws when frozen

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  // U_theta |F(features)>
  StateVector run(std::span<const double> features) const;

  // scaled output alpha*<M>/(2N) + beta; pure function of (features, theta)
  double evaluate(std::span<const double> features) const;
  double evaluate(double x) const { return evaluate(std::span(&x, 1)); }

  // unscaled <Sum_j Z_j>
  double raw_expectation(std::span<const double> features) const;
  double raw_expectation(double x) const { return raw_expectation(std::span(&x, 1)); }

  // feature map and ansatz bound into one gate list (ansatz theta positions
  // come after the feature map's gates)
  BindResult bind_full(std::span<const double> features) const;

private:
  CircuitIR feature_map_;
  CircuitIR ansatz_;
  Observable observable_;
  std::vector<double> theta_;
  bool frozen_ = false;
};

}  // namespace qel
