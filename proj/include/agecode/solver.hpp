#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "agecode/age.hpp"
#include "agecode/pmf.hpp"

namespace agecode {

struct SolverSettings {
  double theta_tolerance = 1e-9;   // |p(theta)| <= theta_tolerance*max(1,theta^2)
  double kraft_tolerance = 1e-10;  // |sum 2^-l - budget| at convergence
  int max_outer_iterations = 200;
  int max_inner_iterations = 200;
};

struct CodebookSolution {
  std::vector<double> lengths;  // bits, synthetic symbol last when present
  double theta = 0.0;           // optimal average age
  double beta = 0.0;            // Kraft multiplier at the optimum
  LengthMoments moments;
  double kraft_residual = 0.0;
  double p_theta_residual = 0.0;
  int iterations = 0;  // outer bisection steps
  std::vector<std::string> warnings;
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Parametric objective whose root in theta is the optimal age, for the
// waiting process with mean a and second moment 2a^2.
double p_theta(const std::vector<double>& lengths, const Pmf& cond_pmf,
               double theta, double a);

// Stationarity lengths for a given (theta, beta), unit Kraft budget,
// waiting mean a. Each output length l_i satisfies
//   -l_i + (beta ln2 / P_i) 2^{-l_i} = (-theta + 2 beta ln2 + 2a) / 3.
std::vector<double> lengths_from_theta_beta(const Pmf& cond_pmf, double theta,
                                            double beta, double a);

// Core parametric solve over an explicit conditional pmf: waiting moments wm,
// Kraft budget in (0,1]. The policy entry points below assemble their
// conditional pmf and waiting process and delegate here.
CodebookSolution solve_codebook(const Pmf& cond_pmf, const WaitingMoments& wm,
                                double kraft_budget,
                                const SolverSettings& settings = {});

CodebookSolution solve_policy1(const Pmf& pmf, int k, double lambda,
                               const SolverSettings& settings = {});
CodebookSolution solve_policy2(const Pmf& pmf, int k, double alpha, double lambda,
                               const SolverSettings& settings = {});
CodebookSolution solve_policy3_noreset(const Pmf& pmf, int k, double lambda,
                                       double c, const SolverSettings& settings = {});
CodebookSolution solve_policy3_reset(const Pmf& pmf, int k, double lambda,
                                     const SolverSettings& settings = {});

// Codeword lengths -log2(budget * P_i): the Kraft-tight entropy baseline the
// optimum must not exceed.
std::vector<double> shannon_lengths(const Pmf& cond_pmf, double kraft_budget = 1.0);

}  // namespace agecode
