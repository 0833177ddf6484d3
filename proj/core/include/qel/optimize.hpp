#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

namespace qel {

enum class OptimizerKind : std::uint8_t { Adam, Lbfgs };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double lr = 0.1;
  std::size_t epochs = 50;
  // ADAM
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // L-BFGS (two-loop recursion, fixed step length = lr, no line search)
  std::size_t history = 10;

  void validate() const;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected ADAM update (minimization direction). Throws on a
// non-finite gradient entry.
void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> gradient, const OptimizerConfig& config);

// L-BFGS direction/update state; history 0 degenerates to plain gradient
// descent with step lr.
class LbfgsState {
public:
  explicit LbfgsState(std::size_t n, std::size_t history)
      : n_(n), history_(history) {}

  // Applies theta += lr * d with d from the two-loop recursion and records
  // the (s, y) pair against the previous iterate.
  void step(std::span<double> params, std::span<const double> gradient,
            double lr);

private:
  std::size_t n_;
  std::size_t history_;
  std::vector<double> prev_params_;
  std::vector<double> prev_grad_;
  std::deque<std::vector<double>> s_;
  std::deque<std::vector<double>> y_;
};

}  // namespace qel
