#include "qel/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qel/state_vector.hpp"

namespace qel {

namespace {

inline int bit_of(std::uint64_t z, std::size_t n, std::size_t i) {
  return static_cast<int>((z >> (n - 1 - i)) & 1);
}

std::uint64_t checked_index(std::string_view bits, std::size_t expected) {
  if (bits.size() != expected) {
    throw std::invalid_argument("bitstring length " + std::to_string(bits.size()) +
                                " does not match instance size " +
                                std::to_string(expected));
  }
  return from_bitstring(bits);
}

}  // namespace

MaxCutInstance gen_maxcut_clusters(std::size_t n, double separation, Rng& rng) {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("maxcut generator needs an even n >= 4");
  }
  MaxCutInstance inst;
  inst.separation = separation;
  inst.points.reserve(n);
  for (std::size_t i = 0; i < n / 2; ++i) {
    inst.points.push_back({rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
  }
  for (std::size_t i = 0; i < n / 2; ++i) {
    inst.points.push_back({separation + rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
  }
  inst.weights.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = inst.points[i][0] - inst.points[j][0];
      const double dy = inst.points[i][1] - inst.points[j][1];
      const double d = std::sqrt(dx * dx + dy * dy);
      inst.weights[i][j] = d;
      inst.weights[j][i] = d;
    }
  }
  return inst;
}

double maxcut_cost(const MaxCutInstance& instance, std::uint64_t z) {
  const std::size_t n = instance.points.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (bit_of(z, n, i) != bit_of(z, n, j)) acc += instance.weights[i][j];
    }
  }
  return acc;
}

double maxcut_cost(const MaxCutInstance& instance, std::string_view bits) {
  return maxcut_cost(instance, checked_index(bits, instance.points.size()));
}

CorrelationChainInstance gen_correlation_chain(std::size_t n, int max_order,
                                               Rng& rng) {
  if (max_order != 2 && max_order != 3) {
    throw std::invalid_argument("chain max_order must be 2 or 3");
  }
  if (n < static_cast<std::size_t>(max_order)) {
    throw std::invalid_argument("chain needs n >= max_order");
  }
  CorrelationChainInstance inst;
  inst.n = n;
  inst.max_order = max_order;
  inst.linear.resize(n);
  for (double& c : inst.linear) c = rng.normal(0.0, 1.0);
  inst.pair.resize(n - 1);
  for (double& c : inst.pair) c = rng.normal(0.0, 1.0);
  if (max_order == 3) {
    inst.triple.resize(n - 2);
    for (double& c : inst.triple) c = rng.normal(0.0, 1.0);
  }
  return inst;
}

double chain_cost(const CorrelationChainInstance& instance, std::uint64_t z) {
  const std::size_t n = instance.n;
  auto spin = [&](std::size_t i) { return 1 - 2 * bit_of(z, n, i); };
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += instance.linear[i] * spin(i);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    acc += instance.pair[i] * spin(i) * spin(i + 1);
  }
  if (instance.max_order == 3) {
    for (std::size_t i = 0; i + 2 < n; ++i) {
      acc += instance.triple[i] * spin(i) * spin(i + 1) * spin(i + 2);
    }
  }
  return acc;
}

double chain_cost(const CorrelationChainInstance& instance, std::string_view bits) {
  return chain_cost(instance, checked_index(bits, instance.n));
}

MoleculeInstance gen_molecule(Rng& rng) {
  MoleculeInstance inst;
  for (auto& site : inst.linear) {
    site[0] = rng.normal(0.0, 1.0);
    site[1] = rng.normal(0.0, 1.0);
  }
  for (auto& pair : inst.quadratic) {
    for (auto& row : pair) {
      for (double& e : row) e = rng.normal(0.0, 2.0);
    }
    pair[0][1] = pair[1][0];  // symmetric pair energies
  }
  return inst;
}

double molecule_energy(const MoleculeInstance& instance, std::uint64_t z) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 5; ++i) acc += instance.linear[i][bit_of(z, 5, i)];
  for (std::size_t i = 0; i < 4; ++i) {
    acc += instance.quadratic[i][bit_of(z, 5, i)][bit_of(z, 5, i + 1)];
  }
  return acc;
}

double molecule_energy(const MoleculeInstance& instance, std::string_view bits) {
  return molecule_energy(instance, checked_index(bits, 5));
}

double mixed_function(double x, int n) {
  switch (n) {
    case 1: return -x * x * std::sin(2.0 * x + 2.0);
    case 2: return x * x * x * std::sin(2.0 * x) - 0.2;
    case 3: {
      const double s = std::sin(2.0 * x - 0.5);
      return s * s - 0.6;
    }
    case 4: return -x * std::sin(2.0 * x + 2.0) / 2.0;
    default:
      throw std::invalid_argument("mixed_function branch must be in {1,2,3,4}");
  }
}

double ode_rhs(double x) {
  return -std::sin(10.0 * x) + 3.0 * std::cos(25.0 * x) - 2.0 * x + 1.25;
}

double ode_solution(double x) {
  return (std::cos(10.0 * x) - 1.0) / 10.0 + (3.0 / 25.0) * std::sin(25.0 * x) -
         x * x + 1.25 * x;
}

double sin5x(double x) { return std::sin(5.0 * x); }

BruteForceResult brute_force_optimum(
    std::size_t n_bits, const std::function<double(std::uint64_t)>& cost,
    Direction direction) {
  if (n_bits < 1 || n_bits > 20) {
    throw std::invalid_argument("brute force supports 1..20 bits");
  }
  const std::uint64_t count = std::uint64_t{1} << n_bits;
  BruteForceResult result;
  std::vector<std::uint64_t> ties;
  double best = cost(0);
  ties.push_back(0);
  for (std::uint64_t z = 1; z < count; ++z) {
    const double v = cost(z);
    const bool better = direction == Direction::Maximize ? v > best : v < best;
    if (better) {
      best = v;
      ties.clear();
      ties.push_back(z);
    } else if (v == best) {
      ties.push_back(z);
    }
  }
  result.value = best;
  result.optimal.reserve(ties.size());
  for (std::uint64_t z : ties) result.optimal.push_back(to_bitstring(z, n_bits));
  return result;
}

BruteForceResult brute_force_optimum(const MaxCutInstance& inst, Direction d) {
  return brute_force_optimum(
      inst.points.size(), [&](std::uint64_t z) { return maxcut_cost(inst, z); }, d);
}

BruteForceResult brute_force_optimum(const CorrelationChainInstance& inst,
                                     Direction d) {
  return brute_force_optimum(
      inst.n, [&](std::uint64_t z) { return chain_cost(inst, z); }, d);
}

BruteForceResult brute_force_optimum(const MoleculeInstance& inst, Direction d) {
  return brute_force_optimum(
      5, [&](std::uint64_t z) { return molecule_energy(inst, z); }, d);
}

MixedOptimum mixed_function_grid_optimum(std::size_t grid_points,
                                         Direction direction) {
  if (grid_points < 2) throw std::invalid_argument("grid needs >= 2 points");
  MixedOptimum best{-1.0, 1, mixed_function(-1.0, 1)};
  for (int n = 1; n <= 4; ++n) {
    for (std::size_t i = 0; i < grid_points; ++i) {
      const double x = -1.0 + 2.0 * static_cast<double>(i) /
                                  static_cast<double>(grid_points - 1);
      const double v = mixed_function(x, n);
      const bool better =
          direction == Direction::Maximize ? v > best.value : v < best.value;
      if (better) best = MixedOptimum{x, n, v};
    }
  }
  return best;
}

Dataset make_discrete_training_set(
    std::size_t n_bits, std::size_t size, Rng& rng,
    const std::function<double(std::uint64_t)>& cost) {
  const std::uint64_t space = std::uint64_t{1} << n_bits;
  if (size < 1 || size > space) {
    throw std::invalid_argument("training-set size must be in [1, 2^n]");
  }
  // partial Fisher-Yates over the index space
  std::vector<std::uint64_t> indices(space);
  std::iota(indices.begin(), indices.end(), 0);
  Dataset out;
  out.samples.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    const std::uint64_t j = i + rng.uniform_index(space - i);
    std::swap(indices[i], indices[j]);
    const std::uint64_t z = indices[i];
    out.samples.push_back({{static_cast<double>(z)}, cost(z)});
  }
  return out;
}

Dataset make_continuous_training_set(const std::function<double(double)>& fn,
                                     double lo, double hi,
                                     std::size_t grid_points, double exclude_lo,
                                     double exclude_hi) {
  if (grid_points < 2) throw std::invalid_argument("grid needs >= 2 points");
  Dataset out;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(grid_points - 1);
    if (x >= exclude_lo && x <= exclude_hi) continue;
    out.samples.push_back({{x}, fn(x)});
  }
  if (out.samples.empty()) {
    throw std::invalid_argument("exclusion window removed every training point");
  }
  return out;
}

Dataset make_mixed_training_set(std::size_t points_per_branch, int exclude_n,
                                double exclude_x, double window) {
  if (points_per_branch < 2) throw std::invalid_argument("need >= 2 points per branch");
  Dataset out;
  for (int n = 1; n <= 4; ++n) {
    for (std::size_t i = 0; i < points_per_branch; ++i) {
      const double x = -1.0 + 2.0 * static_cast<double>(i) /
                                  static_cast<double>(points_per_branch - 1);
      if (n == exclude_n && std::abs(x - exclude_x) <= window) continue;
      out.samples.push_back({{x, static_cast<double>(n - 1)}, mixed_function(x, n)});
    }
  }
  return out;
}

}  // namespace qel
