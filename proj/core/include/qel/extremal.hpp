#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qel/model.hpp"
#include "qel/problems.hpp"

namespace qel {

struct ExtremizeConfig {
  Direction direction = Direction::Maximize;
  double lr = 0.1;
  std::size_t epochs = 100;
  double x0 = 0.0;      // continuous / mixed start
  double lo = -1.0;     // continuous clamp window, intersected with (-1, 1)
  double hi = 1.0;
  std::uint64_t seed = 0;  // discrete extremizer parameter init
  std::size_t depth = 0;   // discrete extremizer ansatz depth; 0 = n_qubits^2

  void validate() const;
};

struct ExtremalResult {
  std::vector<double> trajectory;  // objective per epoch; [0] is pre-update
  double best_input = 0.0;         // continuous x* (mixed: the x parameter)
  double best_value = 0.0;         // objective at the returned optimum
  std::map<std::string, double> distribution;  // bitstring -> probability
  std::vector<std::pair<std::string, double>> top_candidates;
  bool clamped = false;
};

// Fresh variational circuit applied to |0...0> in place of the trained
// model's feature map; its Z-basis distribution proposes candidate inputs.
struct ExtremizerFeatureMap {
  CircuitIR circuit;
  std::vector<double> chi;
};

struct DiscreteExtremizerResult {
  ExtremizerFeatureMap map;
  std::vector<double> trajectory;
};

// ADAM ascent/descent on x with gradients from grad_x; x is clamped into the
// configured window every step. Returns the best iterate, not the last.
// The model must be frozen.
ExtremalResult extremize_continuous(const QuantumModel& model,
                                    const ExtremizeConfig& config);

// Expected model value under the Z-basis distribution of U_chi|0...0>:
//   objective(chi) = Sum_z p_z(chi) * model(z)
// with model(z) evaluated through digital encoding of z. This is the
// quantity the sampling stage realizes, and it is optimized directly.
double discrete_objective(const QuantumModel& model,
                          const ExtremizerFeatureMap& efm);

// Trains the extremizer feature map by ADAM on the discrete objective; the
// model must be frozen and its theta is never touched. Returns the best
// parameters seen (never worse than the initial ones).
DiscreteExtremizerResult train_extremizer_discrete(const QuantumModel& model,
                                                   const ExtremizeConfig& config);

// Exact Z-basis distribution of the extremizer state with the ranked top-k
// candidate bitstrings (ties broken lexicographically).
ExtremalResult sample_extremizer(const ExtremizerFeatureMap& efm,
                                 std::size_t top_k);

double total_optimal_probability(const ExtremalResult& result,
                                 std::span<const std::string> optimal_set);

// Joint extremizer for models on a mixed feature map (Chebyshev tower +
// 2-qubit digital sector): a tower driven by one scalar x plus a
// real-amplitude preparation RY(a), CRY(b) on control=1 and CRY(c) on
// control=0 over the two digital qubits; 4 parameters (x, a, b, c) total,
// starting from x0 and the uniform discrete superposition.
// Returns x* and the 2-qubit marginal distribution at the best iterate.
ExtremalResult extremize_mixed(const QuantumModel& model,
                               const ExtremizeConfig& config);

// State prepared by the mixed extremizer circuit alone (no ansatz) at the
// given parameters; (pi/2, pi/2, pi/2) yields the uniform sector marginal.
StateVector mixed_extremizer_state(const QuantumModel& model, double x,
                                   double a, double b, double c);

}  // namespace qel
