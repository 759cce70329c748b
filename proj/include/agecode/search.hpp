#pragma once

#include <string>
#include <vector>

#include "agecode/pmf.hpp"
#include "agecode/policy.hpp"
#include "agecode/solver.hpp"

namespace agecode {

struct SweepPoint {
  double param = 0.0;
  double age = 0.0;  // meaningful only when converged
  bool converged = false;
  int iterations = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // every attempted grid point, grid order
  std::vector<double> grid;        // converged points only
  std::vector<double> ages;        // aligned with grid
  double argmin_value = 0.0;
  double argmin_age = 0.0;
  std::vector<double> ties;  // grid values within kTieTolerance of the min
  std::vector<std::string> warnings;  // one entry per excluded grid point

  static constexpr double kTieTolerance = 1e-9;
};

struct SelectionRow {
  SelectionSet selection;
  double effective_rate;
  double age;
};

struct SelectionResult {
  SelectionSet selection;  // age-minimizing subset, lexicographic tie-break
  double effective_rate = 0.0;
  double age = 0.0;
  std::vector<SelectionRow> ranked_table;  // best first, up to top_n rows
};

// One solve per k in [k_min, k_max]. The policy's own k field is ignored.
SweepResult sweep_k(const Pmf& pmf, double lambda, const PolicyConfig& policy,
                    int k_min, int k_max, const SolverSettings& settings = {},
                    int jobs = 1);

SweepResult sweep_alpha(const Pmf& pmf, int k, double lambda,
                        const std::vector<double>& alpha_grid,
                        const SolverSettings& settings = {}, int jobs = 1);

SweepResult sweep_empty_length(const Pmf& pmf, int k, double lambda,
                               const std::vector<double>& c_grid,
                               const SolverSettings& settings = {}, int jobs = 1);

// Exhaustive enumeration of all k-subsets in lexicographic order, refused
// above kMaxSubsets. Each subset is solved on its renormalized restriction
// with the waiting rate scaled by the subset mass.
SelectionResult best_selection(const Pmf& pmf, int k, double lambda,
                               const SolverSettings& settings = {}, int jobs = 1,
                               int top_n = 10);

constexpr long long kMaxSubsets = 1000000;

std::vector<double> default_alpha_grid();  // 0.05 steps over (0, 1]
std::vector<double> default_c_grid();      // 0.1 steps over [0.5, 15] plus integers

long long binomial_coefficient(int n, int k);  // saturates at kMaxSubsets + 1

}  // namespace agecode
