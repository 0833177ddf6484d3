#include <benchmark/benchmark.h>

#include "qel/gradients.hpp"
#include "qel/model.hpp"

namespace {

using namespace qel;

void BM_GateApplication(benchmark::State& state) {
  const std::size_t n = state.range(0);
  StateVector s = StateVector::zero(n);
  Rng rng(1);
  std::vector<Gate> gates;
  for (std::size_t q = 0; q < n; ++q) {
    gates.push_back(Gate::ry(q, rng.uniform(-1.0, 1.0)));
    gates.push_back(Gate::rz(q, rng.uniform(-1.0, 1.0)));
    if (q + 1 < n) gates.push_back(Gate::cnot(q, q + 1));
  }
  for (auto _ : state) {
    apply_circuit(s, gates);
    benchmark::DoNotOptimize(s.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations() * gates.size());
}
BENCHMARK(BM_GateApplication)->DenseRange(4, 12, 2);

QuantumModel bench_model(std::size_t n, std::size_t depth) {
  Rng rng(7);
  CircuitIR ansatz = hardware_efficient_ansatz(n, depth);
  return QuantumModel(chebyshev_tower(n), ansatz,
                      Observable{n, 2.0 * static_cast<double>(n), 0.0},
                      random_theta(ansatz.n_variational(), rng));
}

void BM_ModelEvaluate(benchmark::State& state) {
  const auto model = bench_model(state.range(0), state.range(0));
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.evaluate(x));
    x = -x;
  }
}
BENCHMARK(BM_ModelEvaluate)->DenseRange(4, 10, 2);

void BM_GradTheta(benchmark::State& state) {
  const auto model = bench_model(state.range(0), state.range(0));
  const double x = 0.3;
  for (auto _ : state) {
    const GradientReport g = grad_theta(model, std::span(&x, 1));
    benchmark::DoNotOptimize(g.values.data());
  }
  state.SetLabel(std::to_string(model.n_params()) + " params");
}
BENCHMARK(BM_GradTheta)->DenseRange(4, 8, 2);

// the deep configuration used by the discrete pipelines
void BM_GradThetaDeep(benchmark::State& state) {
  Rng rng(7);
  CircuitIR ansatz = hardware_efficient_ansatz(6, 36);
  QuantumModel model(digital_feature_map(6), ansatz, Observable{6, 1.0, 0.5},
                     random_theta(ansatz.n_variational(), rng));
  const double z = 5.0;
  for (auto _ : state) {
    const GradientReport g = grad_theta(model, std::span(&z, 1));
    benchmark::DoNotOptimize(g.values.data());
  }
}
BENCHMARK(BM_GradThetaDeep);

}  // namespace

BENCHMARK_MAIN();
