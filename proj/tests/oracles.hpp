#pragma once

// Independent reference computations used by the test suites. Everything in
// here is deliberately written without touching the library's numeric paths:
// bisection instead of Halley, dense grid scans instead of the parametric
// solver, std::random distributions instead of the counter-based streams.

#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

// Principal-branch Lambert W by bisection on [0, hi], hi expanded until it
// brackets. Accurate to ~1e-13 absolute on the tested domain.
double lambert_bisection(double y);

// Root of -l + (beta ln2 / p) 2^{-l} = (-theta + 2 beta ln2 + 2 a) / 3,
// the per-coordinate stationarity relation at unit Kraft budget.
double stationarity_root(double p, double theta, double beta, double a);

// Minimum average age over codebooks satisfying sum 2^{-l_i} = budget, by
// multi-resolution grid scan in z_i = 2^{-l_i} coordinates. Supports 1 to 3
// codewords; that is the whole point (an oracle only where brute force is
// exact enough). waiting = (E[W], E[W^2]).
double grid_min_age(const std::vector<double>& cond_pmf,
                    std::pair<double, double> waiting, double budget);

// Monte Carlo moments (mean, second) of W = sum of Geometric(q)-many
// Exponential(lambda) interarrivals, via std::mt19937_64.
std::pair<double, double> mc_wait_geometric(double q, double lambda,
                                            int cycles, std::uint64_t seed);

// Same with an added gap of c time units before each failed slot:
// W = (M-1)c + sum of M interarrivals.
std::pair<double, double> mc_wait_gapped(double q, double lambda, double c,
                                         int cycles, std::uint64_t seed);

}  // namespace oracle
