#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qel/rng.hpp"
#include "qel/training.hpp"

namespace qel {

enum class Direction : std::uint8_t { Maximize, Minimize };

// --- Max-Cut clustering -------------------------------------------------------

// Complete graph over 2D points, edge weight = Euclidean distance. Two point
// clusters of n/2 each: [0,1]^2 and [separation, separation+1] x [0,1].
struct MaxCutInstance {
  std::vector<std::array<double, 2>> points;
  std::vector<std::vector<double>> weights;  // symmetric, zero diagonal
  double separation = 0.0;
};

MaxCutInstance gen_maxcut_clusters(std::size_t n, double separation, Rng& rng);

// Sum of w_ij over pairs split by the bitstring. cost(z) == cost(~z).
double maxcut_cost(const MaxCutInstance& instance, std::string_view bits);
double maxcut_cost(const MaxCutInstance& instance, std::uint64_t z);

// --- nearest-neighbor correlation chains ---------------------------------------

// Ising-convention chain: spins s_i = 1 - 2 z_i, randomly weighted
// contiguous-window terms up to max_order (2 or 3).
struct CorrelationChainInstance {
  std::size_t n = 0;
  int max_order = 2;
  std::vector<double> linear;  // n terms
  std::vector<double> pair;    // n-1 terms
  std::vector<double> triple;  // n-2 terms (order 3 only)
};

CorrelationChainInstance gen_correlation_chain(std::size_t n, int max_order,
                                               Rng& rng);
double chain_cost(const CorrelationChainInstance& instance, std::string_view bits);
double chain_cost(const CorrelationChainInstance& instance, std::uint64_t z);

// --- five-substituent molecule ---------------------------------------------------

// Binary choice per substituent; linear site energies ~ N(0,1), symmetric
// nearest-neighbor pair energies ~ N(0,2).
struct MoleculeInstance {
  std::array<std::array<double, 2>, 5> linear{};
  std::array<std::array<std::array<double, 2>, 2>, 4> quadratic{};
};

MoleculeInstance gen_molecule(Rng& rng);
double molecule_energy(const MoleculeInstance& instance, std::string_view bits);
double molecule_energy(const MoleculeInstance& instance, std::uint64_t z);

// --- closed-form benchmark functions ---------------------------------------------

// four-branch mixed-variable benchmark; global minimum f(0.25, 3) = -0.6
double mixed_function(double x, int n);

// f'(x) = -sin(10x) + 3 cos(25x) - 2x + 5/4 with f(0) = 0, and its solution
double ode_rhs(double x);
double ode_solution(double x);

double sin5x(double x);

// --- oracles ----------------------------------------------------------------------

struct BruteForceResult {
  std::vector<std::string> optimal;  // every tie, lexicographic order
  double value = 0.0;
};

// Exhaustive scan of all 2^n bitstrings; n <= 20.
BruteForceResult brute_force_optimum(
    std::size_t n_bits, const std::function<double(std::uint64_t)>& cost,
    Direction direction);
BruteForceResult brute_force_optimum(const MaxCutInstance&, Direction);
BruteForceResult brute_force_optimum(const CorrelationChainInstance&, Direction);
BruteForceResult brute_force_optimum(const MoleculeInstance&, Direction);

// dense grid scan of mixed_function over x in [-1, 1] x n in {1..4}
struct MixedOptimum {
  double x = 0.0;
  int n = 1;
  double value = 0.0;
};
MixedOptimum mixed_function_grid_optimum(std::size_t grid_points,
                                         Direction direction);

// --- training-set construction ------------------------------------------------------

// `size` distinct bitstrings drawn without replacement; inputs are the basis
// indices as a single feature, targets the raw cost.
Dataset make_discrete_training_set(std::size_t n_bits, std::size_t size,
                                   Rng& rng,
                                   const std::function<double(std::uint64_t)>& cost);

// Uniform grid over [lo, hi] minus an optional exclusion window.
Dataset make_continuous_training_set(const std::function<double(double)>& fn,
                                     double lo, double hi, std::size_t grid_points,
                                     double exclude_lo = 1.0, double exclude_hi = 0.0);

// Per-branch grids over x in [-1, 1]; points with |x - exclude_x| <= window on
// branch exclude_n are dropped. Inputs are (x, n-1): the branch is zero-based
// for the digital encoding.
Dataset make_mixed_training_set(std::size_t points_per_branch, int exclude_n,
                                double exclude_x, double window);

}  // namespace qel
