#pragma once

#include <cstddef>

#include "qel/state_vector.hpp"

namespace qel {

// Total-magnetization observable Sum_j Z_j with affine output scaling.
// The raw expectation lies in [-N, +N]; the reported model output is
// alpha * raw / (2N) + beta, so alpha = 1, beta = 0.5 maps onto [0, 1] and
// alpha = 2N, beta = 0 reproduces the raw value.
struct Observable {
  std::size_t n_qubits = 1;
  double alpha = 1.0;
  double beta = 0.5;

  double raw(const StateVector& state) const { return expectation_z_sum(state); }

  double scale(double raw_value) const {
    return alpha * raw_value / (2.0 * static_cast<double>(n_qubits)) + beta;
  }

  // d(scaled)/d(raw)
  double scale_factor() const {
    return alpha / (2.0 * static_cast<double>(n_qubits));
  }

  double expectation(const StateVector& state) const { return scale(raw(state)); }

  // alpha is meaningful in [1, 100]; enforced where models are assembled
  void validate() const;
};

}  // namespace qel
