#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qel/problems.hpp"
#include "qel/training.hpp"

using namespace qel;

namespace {

QuantumModel small_model(std::size_t n, std::size_t depth, std::uint64_t seed,
                         double alpha, double beta) {
  Rng rng(seed);
  CircuitIR ansatz = hardware_efficient_ansatz(n, depth);
  std::vector<double> theta = random_theta(ansatz.n_variational(), rng);
  return QuantumModel(chebyshev_tower(n), ansatz, Observable{n, alpha, beta},
                      std::move(theta));
}

// quadratic test objective sum (theta_i - 1)^2, independent of any circuit
class QuadraticLoss final : public Loss {
 public:
  double value(const QuantumModel& m) const override {
    double acc = 0.0;
    for (double t : m.theta()) acc += (t - 1.0) * (t - 1.0);
    return acc;
  }
  GradientReport gradient(const QuantumModel& m) const override {
    GradientReport g;
    for (double t : m.theta()) g.values.push_back(2.0 * (t - 1.0));
    return g;
  }
};

}  // namespace

TEST_CASE("scale_targets") {
  Dataset d;
  d.samples = {{{0.0}, -3.0}, {{1.0}, 3.0}};
  auto [scaled, map] = scale_targets(d);
  CHECK(scaled.samples[0].target == doctest::Approx(0.0));
  CHECK(scaled.samples[1].target == doctest::Approx(1.0));

  Dataset three;
  three.samples = {{{0.0}, 0.0}, {{1.0}, 1.0}, {{2.0}, 2.0}};
  auto [s3, m3] = scale_targets(three);
  CHECK(s3.samples[1].target == doctest::Approx(0.5));

  // round trip
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const double y = rng.uniform(-7.0, 9.0);
    CHECK(m3.invert(m3.apply(y)) == doctest::Approx(y).epsilon(1e-12));
  }

  Dataset degenerate;
  degenerate.samples = {{{0.0}, 2.0}, {{1.0}, 2.0}};
  CHECK_THROWS_AS(scale_targets(degenerate), std::invalid_argument);
  CHECK_THROWS_AS(scale_targets(Dataset{}), std::invalid_argument);
}

TEST_CASE("mse loss") {
  // constant model: empty circuits on |0> give raw <Z> = 1, output 1/2
  QuantumModel konst(CircuitIR(1), CircuitIR(1), Observable{1, 1.0, 0.0}, {});
  REQUIRE(konst.evaluate(std::span<const double>{}) == doctest::Approx(0.5));
  Dataset d;
  d.samples = {{{}, 0.0}, {{}, 1.0}};
  // constant 0.5 on targets {0, 1}: (0.25 + 0.25) / 2
  CHECK(mse_loss(konst, d) == doctest::Approx(0.25));

  // exact fit: targets equal to the model output
  Dataset exact;
  exact.samples = {{{}, 0.5}, {{}, 0.5}};
  CHECK(mse_loss(konst, exact) == doctest::Approx(0.0));

  // order invariance
  Dataset rev = d;
  std::swap(rev.samples[0], rev.samples[1]);
  CHECK(mse_loss(konst, d) == doctest::Approx(mse_loss(konst, rev)));

  CHECK_THROWS_AS(mse_loss(konst, Dataset{}), std::invalid_argument);
}

TEST_CASE("mse loss gradient matches grad_theta composition") {
  const auto model = small_model(2, 2, 11, 1.0, 0.5);
  Dataset d;
  d.samples = {{{0.2}, 0.3}, {{-0.5}, 0.8}, {{0.9}, 0.1}};
  const MseLoss loss(d);
  const GradientReport g = loss.gradient(model);

  std::vector<double> expect(model.n_params(), 0.0);
  for (const auto& s : d.samples) {
    const double f = model.evaluate(s.input);
    const GradientReport gi = grad_theta(model, s.input);
    for (std::size_t k = 0; k < expect.size(); ++k) {
      expect[k] += 2.0 * (f - s.target) * gi.values[k] /
                   static_cast<double>(d.samples.size());
    }
  }
  for (std::size_t k = 0; k < expect.size(); ++k) {
    CHECK(g.values[k] == doctest::Approx(expect[k]).epsilon(1e-10));
  }
}

TEST_CASE("adam steps") {
  OptimizerConfig cfg;
  cfg.lr = 0.1;

  // first bias-corrected step has magnitude ~ lr for any constant gradient
  {
    AdamState st(1);
    std::vector<double> p{0.0};
    std::vector<double> g{3.7};
    adam_step(st, p, g, cfg);
    CHECK(std::abs(p[0] + cfg.lr) < 1e-8 * cfg.lr + 1e-12);
  }
  // zero gradient leaves parameters unchanged
  {
    AdamState st(2);
    std::vector<double> p{0.4, -0.2};
    const std::vector<double> g{0.0, 0.0};
    adam_step(st, p, g, cfg);
    CHECK(p[0] == doctest::Approx(0.4));
    CHECK(p[1] == doctest::Approx(-0.2));
  }
  // NaN gradient is rejected
  {
    AdamState st(1);
    std::vector<double> p{0.0};
    const std::vector<double> g{std::nan("")};
    CHECK_THROWS_AS(adam_step(st, p, g, cfg), std::invalid_argument);
  }
}

TEST_CASE("adam reaches the quadratic optimum") {
  // 200 steps at lr 0.1 on sum (theta_i - 1)^2 from the usual init
  QuantumModel model(CircuitIR(2), hardware_efficient_ansatz(2, 1),
                     Observable{2, 1.0, 0.5},
                     std::vector<double>(4, 0.05));
  QuadraticLoss loss;
  OptimizerConfig cfg;
  cfg.kind = OptimizerKind::Adam;
  cfg.lr = 0.1;
  cfg.epochs = 200;
  const TrainReport r = fit(model, loss, cfg);
  CHECK(r.final_loss < 1e-4);
  CHECK(r.loss_trajectory.size() == 200);
}

TEST_CASE("lbfgs on a quadratic") {
  // converges to theta* within 1e-6 in at most 20 iterations
  {
    QuantumModel model(CircuitIR(1), hardware_efficient_ansatz(1, 1),
                       Observable{1, 1.0, 0.5}, std::vector<double>{-0.3, 0.1});
    QuadraticLoss loss;
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::Lbfgs;
    cfg.lr = 0.5;
    cfg.epochs = 20;
    const TrainReport r = fit(model, loss, cfg);
    CHECK(r.final_loss < 1e-12);  // implies |theta - 1| < 1e-6
    CHECK(r.improved);
  }
  // zero history degenerates to gradient descent and still improves
  {
    QuantumModel model(CircuitIR(1), hardware_efficient_ansatz(1, 1),
                       Observable{1, 1.0, 0.5}, std::vector<double>{0.0, 0.0});
    QuadraticLoss loss;
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::Lbfgs;
    cfg.lr = 0.1;
    cfg.epochs = 10;
    cfg.history = 0;
    const TrainReport r = fit(model, loss, cfg);
    CHECK(r.final_loss < r.loss_trajectory.front());
  }
  // a zero-gradient start stops immediately
  {
    QuantumModel model(CircuitIR(1), hardware_efficient_ansatz(1, 1),
                       Observable{1, 1.0, 0.5}, std::vector<double>{1.0, 1.0});
    QuadraticLoss loss;
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::Lbfgs;
    cfg.lr = 0.5;
    cfg.epochs = 20;
    const TrainReport r = fit(model, loss, cfg);
    CHECK(r.loss_trajectory.size() == 1);
    CHECK(r.final_loss == doctest::Approx(0.0));
  }
}

TEST_CASE("ode residual loss") {
  // a model constant in x solves f' = 0 when the boundary value matches
  {
    QuantumModel konst(CircuitIR(2), hardware_efficient_ansatz(2, 1),
                       Observable{2, 1.0, 0.5},
                       std::vector<double>(4, 0.0));
    OdeSpec ode;
    ode.rhs = [](double) { return 0.0; };
    ode.boundary_x = 0.0;
    ode.boundary_value = konst.evaluate(std::span<const double>{});
    ode.collocation = 10;
    CHECK(ode_residual_loss(konst, ode) == doctest::Approx(0.0).epsilon(1e-12));
  }
  // untrained flat model against the oscillatory right-hand side:
  // the x = 0 residual alone contributes rhs(0)^2 = 4.25^2 = 18.0625
  {
    QuantumModel flat(CircuitIR(1), CircuitIR(1), Observable{1, 1.0, 0.5}, {});
    OdeSpec ode;
    ode.rhs = ode_rhs;
    ode.collocation = 1;  // invalid: needs >= 2
    CHECK_THROWS_AS(OdeResidualLoss{ode}, std::invalid_argument);
    ode.collocation = 2;
    ode.hi = 1e-9;  // grid {0, 1e-9}: both residuals are essentially rhs(0)
    ode.boundary_value = flat.evaluate(std::span<const double>{});
    const double loss = ode_residual_loss(flat, ode);
    CHECK(loss >= 18.0625 - 1e-6);
  }
  // boundary outside the domain is rejected
  {
    OdeSpec ode;
    ode.rhs = ode_rhs;
    ode.boundary_x = 2.0;
    CHECK_THROWS_AS(ode.validate(), std::invalid_argument);
  }
}

TEST_CASE("ode residual gradient matches the mixed-derivative composition") {
  const auto model = small_model(2, 2, 23, 4.0, 0.0);
  OdeSpec ode;
  ode.rhs = [](double x) { return 2.0 * x; };
  ode.collocation = 5;
  const OdeResidualLoss loss(ode);
  const GradientReport g = loss.gradient(model);

  // independent composition from the public gradient operations; the loss
  // evaluates derivatives at margin-clamped collocation points
  std::vector<double> expect(model.n_params(), 0.0);
  const auto grid = ode.grid();
  for (double x : grid) {
    const double cx =
        std::clamp(x, -1.0 + ode.derivative_margin, 1.0 - ode.derivative_margin);
    const double r = grad_x(model, cx).value - ode.rhs(x);
    const GradientReport mixed = grad_theta_of_df_dx(model, cx);
    for (std::size_t k = 0; k < expect.size(); ++k) {
      expect[k] += 2.0 * r * mixed.values[k] / static_cast<double>(grid.size());
    }
  }
  const double fb = model.evaluate(ode.boundary_x) - ode.boundary_value;
  const GradientReport gb = grad_theta(model, std::span(&ode.boundary_x, 1));
  for (std::size_t k = 0; k < expect.size(); ++k) {
    expect[k] += 2.0 * ode.boundary_weight * fb * gb.values[k];
  }
  for (std::size_t k = 0; k < expect.size(); ++k) {
    CHECK(g.values[k] == doctest::Approx(expect[k]).epsilon(1e-9));
  }
}

TEST_CASE("fit freezes the model and records the trajectory") {
  auto model = small_model(2, 1, 31, 1.0, 0.5);
  Dataset d;
  d.samples = {{{0.1}, 0.3}, {{0.7}, 0.9}, {{-0.4}, 0.5}};
  const MseLoss loss(d);
  OptimizerConfig cfg;
  cfg.lr = 0.5;
  cfg.epochs = 10;
  const TrainReport r = fit(model, loss, cfg);
  CHECK(model.frozen());
  CHECK(r.loss_trajectory.size() == 10);
  CHECK(r.final_theta.size() == model.n_params());

  // refitting a frozen model is a contract violation
  CHECK_THROWS_AS(fit(model, loss, cfg), std::logic_error);
}

TEST_CASE("zero-epoch fit reports the initial loss and still freezes") {
  auto model = small_model(2, 1, 31, 1.0, 0.5);
  Dataset d;
  d.samples = {{{0.1}, 0.3}, {{0.7}, 0.9}};
  const MseLoss loss(d);
  const TrainReport r = fit(model, loss, std::span<const OptimizerConfig>{});
  CHECK(r.loss_trajectory.size() == 1);
  CHECK(r.final_loss == doctest::Approx(r.loss_trajectory.front()));
  CHECK(model.frozen());
}

TEST_CASE("training determinism") {
  auto run_once = [] {
    auto model = small_model(3, 2, 77, 1.0, 0.5);
    Dataset d;
    d.samples = {{{0.1}, 0.2}, {{0.5}, 0.9}, {{0.9}, 0.4}, {{-0.3}, 0.6}};
    const MseLoss loss(d);
    OptimizerConfig cfg;
    cfg.lr = 0.3;
    cfg.epochs = 12;
    return fit(model, loss, cfg).loss_trajectory;
  };
  const auto a = run_once();
  const auto b = run_once();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);  // bitwise identical
  }
}

TEST_CASE("losses are non-negative") {
  Rng rng(3);
  for (int rep = 0; rep < 5; ++rep) {
    const auto model = small_model(2, 2, rng.next_u64(), 1.0, 0.5);
    Dataset d;
    for (int i = 0; i < 6; ++i) {
      d.samples.push_back({{rng.uniform(-0.9, 0.9)}, rng.uniform(0.0, 1.0)});
    }
    CHECK(mse_loss(model, d) >= 0.0);

    OdeSpec ode;
    ode.rhs = ode_rhs;
    ode.collocation = 7;
    CHECK(ode_residual_loss(model, ode) >= 0.0);
  }
}

TEST_CASE("analytic ode solution satisfies the equation") {
  // |d/dx solution - rhs| < 1e-8 under central differences on a dense grid
  const double h = 1e-6;
  for (int i = 0; i <= 1000; ++i) {
    const double x = 0.001 * i;
    const double fd = (ode_solution(x + h) - ode_solution(x - h)) / (2.0 * h);
    CHECK(std::abs(fd - ode_rhs(x)) < 1e-8);
  }
  CHECK(ode_solution(0.0) == doctest::Approx(0.0));
  CHECK(ode_rhs(0.0) == doctest::Approx(4.25));

  // the residual of the analytic solution itself is tiny on the grid
  OdeSpec ode;
  ode.rhs = ode_rhs;
  ode.collocation = 50;
  double residual = 0.0;
  for (double x : ode.grid()) {
    const double fd = (ode_solution(x + h) - ode_solution(x - h)) / (2.0 * h);
    residual += (fd - ode_rhs(x)) * (fd - ode_rhs(x));
  }
  residual /= 50.0;
  residual += ode_solution(0.0) * ode_solution(0.0);
  CHECK(residual < 1e-6);
}
