#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qel/model.hpp"

namespace qel {

struct GradientReport {
  std::vector<double> values;
  std::size_t evaluations = 0;  // expectation evaluations performed
  bool clamped = false;         // a continuous feature was clamped
};

struct InputGradient {
  double value = 0.0;
  std::size_t evaluations = 0;
  bool clamped = false;
};

// d(scaled output)/d(theta_k) via the parameter-shift rule: two shifted
// evaluations per rotation parameter, four per CRY parameter.
GradientReport grad_theta(const QuantumModel& model,
                          std::span<const double> features);

// d(scaled output)/dx for a model whose feature map is Chebyshev-bound:
// chain rule over the feature gates, d(2j arccos x)/dx = -2j / sqrt(1 - x^2),
// each dE/dphi_j obtained by parameter shift. |x| >= 1 is clamped and flagged.
InputGradient grad_x(const QuantumModel& model, double x);

// d/d(theta_k) of [d(scaled output)/dx] via nested parameter shift;
// 4 * n_params * n_feature_gates evaluations.
GradientReport grad_theta_of_df_dx(const QuantumModel& model, double x);

// --- evaluation engine -------------------------------------------------------
//
// Parameter-shift evaluation of a fixed gate sequence against a diagonal
// observable, for arbitrary input states. Immutable after construction;
// value() and gradient() may run concurrently from several threads. When the memory budget allows
// (positions * 16 bytes * 4^n within kShiftCacheBudget) the engine precomputes
// suffix-conjugated observables once, making repeated gradients over many
// input states cheap; otherwise each shifted expectation re-simulates the
// circuit. Both paths produce identical parameter-shift values.
class ShiftGradientEngine {
public:
  inline static constexpr std::size_t kShiftCacheBudget = 64ull << 20;

  // `positions` index into `gates`, strictly increasing, each an angle gate.
  // `reuse_hint` is the expected number of gradient() calls; the suffix
  // cache only pays off when its one-off sweep amortizes over them. A hint
  // of 0 disables the cache.
  ShiftGradientEngine(std::size_t n_qubits, std::vector<Gate> gates,
                      std::vector<std::size_t> positions,
                      std::vector<double> observable_diagonal,
                      std::size_t reuse_hint = 1);

  // <input| G† D G |input>
  double value(const StateVector& input) const;

  // dE/d(angle) at every shifted position; out.size() == positions count.
  void gradient(const StateVector& input, std::span<double> out,
                std::size_t& evaluations) const;

  std::size_t n_positions() const { return positions_.size(); }
  bool cached() const { return cached_; }

private:
  double sandwich(const StateVector& prefix, const Gate& shifted,
                  const std::vector<Complex>& suffix_observable) const;
  double shifted_value(const StateVector& input, std::size_t position,
                       double shift) const;

  std::size_t n_qubits_ = 0;
  std::size_t dim_ = 0;
  std::vector<Gate> gates_;
  std::vector<std::size_t> positions_;
  std::vector<double> diag_;
  bool cached_ = false;
  // suffix_[k] = conjugation of diag(D) by every gate after positions_[k],
  // row-major dense dim x dim
  std::vector<std::vector<Complex>> suffix_;
};

// diagonal of Sum_j Z_j in the computational basis
std::vector<double> magnetization_diagonal(std::size_t n_qubits);

// four-point shift rule constants for controlled rotations
inline constexpr double kCryShiftC1 = 0.42677669529663687;  // (sqrt2+1)/(4 sqrt2)
inline constexpr double kCryShiftC2 = 0.07322330470336313;  // (sqrt2-1)/(4 sqrt2)

}  // namespace qel
