#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qel/gradients.hpp"
#include "qel/model.hpp"

using namespace qel;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFdStep = 1e-5;  // central-difference step used by the oracles

// central finite difference of the scaled model w.r.t. theta_k
double fd_theta(const QuantumModel& model, std::span<const double> features,
                std::size_t k) {
  std::vector<double> up(model.theta().begin(), model.theta().end());
  std::vector<double> dn = up;
  up[k] += kFdStep;
  dn[k] -= kFdStep;
  QuantumModel mu(model.feature_map(), model.ansatz(), model.observable(), up);
  QuantumModel md(model.feature_map(), model.ansatz(), model.observable(), dn);
  return (mu.evaluate(features) - md.evaluate(features)) / (2.0 * kFdStep);
}

double fd_x(const QuantumModel& model, double x) {
  return (model.evaluate(x + kFdStep) - model.evaluate(x - kFdStep)) /
         (2.0 * kFdStep);
}

// single-qubit model whose raw output is cos(theta)
QuantumModel cosine_model(double theta) {
  CircuitIR ansatz(1);
  ansatz.append(GateKind::RY, 0, binding::Variational{0});
  return QuantumModel(CircuitIR(1), ansatz, Observable{1, 2.0, 0.0}, {theta});
}

QuantumModel random_model(std::size_t n, std::size_t depth, bool with_cry,
                          Rng& rng) {
  CircuitIR ansatz(n);
  std::size_t p = 0;
  for (std::size_t layer = 0; layer < depth; ++layer) {
    for (std::size_t q = 0; q < n; ++q) {
      switch (rng.uniform_index(3)) {
        case 0: ansatz.append(GateKind::RX, q, binding::Variational{p++}); break;
        case 1: ansatz.append(GateKind::RY, q, binding::Variational{p++}); break;
        default: ansatz.append(GateKind::RZ, q, binding::Variational{p++}); break;
      }
    }
    for (std::size_t q = 0; q + 1 < n; ++q) {
      if (with_cry && rng.uniform01() < 0.3) {
        ansatz.append_controlled(GateKind::CRY, q, q + 1,
                                 binding::Variational{p++});
      } else {
        ansatz.append_controlled(GateKind::CNOT, q, q + 1);
      }
    }
  }
  Rng init(rng.next_u64());
  std::vector<double> theta(ansatz.n_variational());
  for (double& t : theta) t = init.uniform(-kPi, kPi);
  return QuantumModel(chebyshev_tower(n), ansatz,
                      Observable{n, 2.0 * static_cast<double>(n), 0.0},
                      std::move(theta));
}

}  // namespace

TEST_CASE("grad_theta on the cosine model") {
  // theta = 0 sits at the extremum of cos
  {
    const auto model = cosine_model(0.0);
    const GradientReport g = grad_theta(model, {});
    CHECK(g.values.size() == 1);
    CHECK(g.values[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(g.evaluations == 2);
  }
  // theta = pi/3: d cos / d theta = -sin(pi/3)
  {
    const auto model = cosine_model(kPi / 3.0);
    const GradientReport g = grad_theta(model, {});
    CHECK(g.values[0] == doctest::Approx(-0.86602540378443860).epsilon(1e-12));
  }
}

TEST_CASE("grad_theta matches finite differences on random models") {
  Rng rng(301);
  for (int rep = 0; rep < 12; ++rep) {
    const std::size_t n = 2 + rng.uniform_index(2);
    const auto model = random_model(n, 2, rep % 2 == 1, rng);
    const double x = rng.uniform(-0.9, 0.9);
    const GradientReport g = grad_theta(model, std::span(&x, 1));
    for (std::size_t k = 0; k < model.n_params(); ++k) {
      const double fd = fd_theta(model, std::span(&x, 1), k);
      CHECK(std::abs(g.values[k] - fd) < 1e-6);
    }
  }
}

TEST_CASE("gradient evaluation counting") {
  Rng rng(88);
  const auto model = random_model(3, 2, false, rng);
  const double x = 0.3;
  const GradientReport g = grad_theta(model, std::span(&x, 1));
  CHECK(g.evaluations == 2 * model.n_params());
}

TEST_CASE("gradient linearity in the output scaling") {
  Rng rng(13);
  CircuitIR ansatz = hardware_efficient_ansatz(3, 2);
  std::vector<double> theta(ansatz.n_variational());
  for (double& t : theta) t = rng.uniform(-1.0, 1.0);

  QuantumModel raw(chebyshev_tower(3), ansatz, Observable{3, 6.0, 0.0}, theta);
  QuantumModel scaled(chebyshev_tower(3), ansatz, Observable{3, 2.5, 0.5}, theta);
  const double x = 0.4;
  const GradientReport gr = grad_theta(raw, std::span(&x, 1));
  const GradientReport gs = grad_theta(scaled, std::span(&x, 1));
  // scaled gradient = (alpha / 2N) x raw-expectation gradient elementwise
  for (std::size_t k = 0; k < gr.values.size(); ++k) {
    CHECK(std::abs(gs.values[k] - gr.values[k] / 6.0 * 2.5) < 1e-12);
  }
}

TEST_CASE("grad_x on the identity-ansatz tower") {
  // raw output T_2(x); d/dx = 4x
  QuantumModel model(chebyshev_tower(1), CircuitIR(1), Observable{1, 2.0, 0.0}, {});
  CHECK(grad_x(model, 0.5).value == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(grad_x(model, 0.0).value == doctest::Approx(0.0).epsilon(1e-12));

  const InputGradient edge = grad_x(model, 1.0 - 1e-7);
  CHECK(std::isfinite(edge.value));

  const InputGradient beyond = grad_x(model, 1.5);
  CHECK(beyond.clamped);
  CHECK(std::isfinite(beyond.value));
}

TEST_CASE("grad_x matches finite differences on random models") {
  Rng rng(99);
  const auto model = random_model(3, 2, false, rng);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform(-0.9, 0.9);
    CHECK(std::abs(grad_x(model, x).value - fd_x(model, x)) < 1e-5);
  }
}

TEST_CASE("grad_theta_of_df_dx") {
  // RZ parameter commutes with the observable: the mixed derivative vanishes
  {
    CircuitIR ansatz(1);
    ansatz.append(GateKind::RZ, 0, binding::Variational{0});
    QuantumModel model(chebyshev_tower(1), ansatz, Observable{1, 2.0, 0.0}, {0.37});
    const GradientReport g = grad_theta_of_df_dx(model, 0.4);
    CHECK(g.values[0] == doctest::Approx(0.0).epsilon(1e-12));
  }
  // random two-qubit model: matches finite difference of grad_x over theta
  {
    Rng rng(41);
    const auto model = random_model(2, 2, false, rng);
    const double x = 0.3;
    const GradientReport g = grad_theta_of_df_dx(model, x);
    CHECK(g.evaluations == 4 * model.n_params() * model.feature_map().n_qubits());
    for (std::size_t k = 0; k < model.n_params(); ++k) {
      std::vector<double> up(model.theta().begin(), model.theta().end());
      std::vector<double> dn = up;
      up[k] += kFdStep;
      dn[k] -= kFdStep;
      QuantumModel mu(model.feature_map(), model.ansatz(), model.observable(), up);
      QuantumModel md(model.feature_map(), model.ansatz(), model.observable(), dn);
      const double fd =
          (grad_x(mu, x).value - grad_x(md, x).value) / (2.0 * kFdStep);
      CHECK(std::abs(g.values[k] - fd) < 1e-5);
    }
  }
}

TEST_CASE("cached and direct engine paths agree") {
  Rng rng(510);
  const auto model = random_model(3, 3, true, rng);
  const double x = 0.25;
  const BindResult bound = model.bind_full(std::span(&x, 1));
  const auto diag = magnetization_diagonal(3);

  // force both paths via the reuse hint
  ShiftGradientEngine cached(3, bound.gates, bound.variational_positions, diag,
                             1000000);
  ShiftGradientEngine direct(3, bound.gates, bound.variational_positions, diag, 0);
  CHECK(cached.cached());
  CHECK(!direct.cached());

  const StateVector zero = StateVector::zero(3);
  std::vector<double> a(model.n_params()), b(model.n_params());
  std::size_t ea = 0, eb = 0;
  cached.gradient(zero, a, ea);
  direct.gradient(zero, b, eb);
  CHECK(ea == eb);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
  }
  CHECK(cached.value(zero) == doctest::Approx(direct.value(zero)).epsilon(1e-12));
}

TEST_CASE("variational bindings on angle-free gates are rejected") {
  CircuitIR circuit(2);
  CHECK_THROWS_AS(circuit.append(GateKind::X, 0, binding::Variational{0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      circuit.append_controlled(GateKind::CNOT, 0, 1, binding::Variational{0}),
      std::invalid_argument);
}
