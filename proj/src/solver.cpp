#include "agecode/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "agecode/lambert.hpp"

namespace agecode {

namespace {

constexpr double kLn2 = 0.693147180559945309417232;
constexpr double kMinConditionalProb = 1e-12;
constexpr double kBetaBracketStart = 1e-12;
constexpr double kBetaBracketCap = 1e12;

void check_conditional(const Pmf& pmf, const char* who) {
  for (std::size_t i = 0; i < pmf.size(); ++i)
    if (pmf[i] < kMinConditionalProb) {
      std::ostringstream os;
      os << who << ": conditional probability " << pmf[i] << " at symbol "
         << i + 1 << " is below 1e-12; its codeword length diverges";
      throw std::invalid_argument(os.str());
    }
}

double kraft_sum(const std::vector<double>& lengths) {
  double s = 0.0;
  for (double l : lengths) s += std::exp2(-l);
  return s;
}

// Stationarity lengths for (theta, beta) with waiting mean w_mean and Kraft
// budget B. Derivation: summing the per-symbol stationarity condition under a
// tight budget pins E[L] = (theta + beta ln2 B - 2 w_mean) / 3, and
// substituting it back turns each per-symbol condition into
//   u e^u = (beta ln^2(2) / P_i) * 2^R,  u = (beta ln^2(2) / P_i) 2^{-l_i},
// with R = (-theta + 2 beta ln2 B + 2 w_mean) / 3. Hence l_i via W.
std::vector<double> stationarity_lengths(const Pmf& pmf, double theta, double beta,
                                         double w_mean, double budget) {
  double r_exponent = (-theta + 2.0 * beta * kLn2 * budget + 2.0 * w_mean) / 3.0;
  double ln_c = std::log(beta * kLn2 * kLn2);
  std::vector<double> lengths(pmf.size());
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    // Work with ln(argument): beta sweeps many decades during bracketing and
    // the argument itself can overflow.
    double ln_y = ln_c - std::log(pmf[i]) + r_exponent * kLn2;
    double u = lambert_w0_from_log(ln_y);
    // 2^{-l_i} = P_i u / (beta ln^2 2) and ln_c - ln P_i = ln_y - R ln2,
    // so l_i = (ln_y - ln u)/ln2 - R.
    lengths[i] = (ln_y - std::log(u)) / kLn2 - r_exponent;
  }
  return lengths;
}

double p_value(const std::vector<double>& lengths, const Pmf& pmf, double theta,
               const WaitingMoments& wm) {
  LengthMoments lm = length_moments(pmf, lengths);
  return 0.5 * lm.second + lm.mean * lm.mean + (2.0 * wm.mean - theta) * lm.mean +
         0.5 * wm.second - theta * wm.mean;
}

struct InnerResult {
  bool bracketed = false;  // false: Kraft sum below budget for all beta
  double beta = 0.0;
  std::vector<double> lengths;
  double kraft_residual = 0.0;
  bool monotone = true;
};

// For fixed theta, find beta > 0 with sum 2^{-l_i(theta,beta)} = budget.
// The root is unique whenever it exists: any (theta, beta) pair meeting the
// budget satisfies the full stationarity system, whose solution is the unique
// minimizer of a strictly convex problem. A sum already below budget at the
// bracket start means the budget constraint is slack for this theta, which
// only happens above the optimal theta; callers treat that as p < 0.
InnerResult solve_beta(const Pmf& pmf, double theta, const WaitingMoments& wm,
                       double budget, const SolverSettings& settings) {
  InnerResult res;
  auto sum_at = [&](double beta) {
    return kraft_sum(stationarity_lengths(pmf, theta, beta, wm.mean, budget));
  };

  double lo = kBetaBracketStart;
  double f_lo = sum_at(lo);
  if (f_lo <= budget) return res;  // not bracketed

  double hi = 1.0;
  double prev = f_lo;
  double f_hi = sum_at(hi);
  // The sampled sums should fall monotonically toward the root; record any
  // rise beyond rounding noise for the diagnostics channel.
  while (f_hi > budget) {
    if (f_hi > prev * (1.0 + 1e-9)) res.monotone = false;
    prev = f_hi;
    hi *= 4.0;
    if (hi > kBetaBracketCap)
      throw SolverError("inner bracket: Kraft sum stayed above budget up to beta = 1e12");
    f_hi = sum_at(hi);
  }

  double ln_lo = std::log(lo), ln_hi = std::log(hi);
  double best_beta = hi, best_gap = std::fabs(f_hi - budget);
  for (int i = 0; i < settings.max_inner_iterations; ++i) {
    double ln_mid = 0.5 * (ln_lo + ln_hi);
    double beta = std::exp(ln_mid);
    double f = sum_at(beta);
    double gap = std::fabs(f - budget);
    if (gap < best_gap) {
      best_gap = gap;
      best_beta = beta;
    }
    if (gap <= 5e-13) break;
    if (f > budget)
      ln_lo = ln_mid;
    else
      ln_hi = ln_mid;
  }
  res.bracketed = true;
  res.beta = best_beta;
  res.lengths = stationarity_lengths(pmf, theta, best_beta, wm.mean, budget);
  res.kraft_residual = kraft_sum(res.lengths) - budget;
  return res;
}

CodebookSolution single_symbol_solution(const Pmf& pmf, const WaitingMoments& wm,
                                        double budget) {
  // Kraft equality fixes the lone length, and theta is the closed-form age.
  CodebookSolution sol;
  double l = -std::log2(budget);
  sol.lengths = {l};
  sol.moments = LengthMoments{l, l * l};
  sol.theta = age_from_moments(sol.moments, wm);
  sol.beta = std::fmax(0.0, (3.0 * l - sol.theta + 2.0 * wm.mean) / (kLn2 * budget));
  sol.kraft_residual = std::exp2(-l) - budget;
  sol.p_theta_residual = p_value(sol.lengths, pmf, sol.theta, wm);
  sol.iterations = 0;
  return sol;
}

}  // namespace

std::vector<double> shannon_lengths(const Pmf& cond_pmf, double kraft_budget) {
  std::vector<double> l(cond_pmf.size());
  for (std::size_t i = 0; i < cond_pmf.size(); ++i)
    l[i] = -std::log2(kraft_budget * cond_pmf[i]);
  return l;
}

double p_theta(const std::vector<double>& lengths, const Pmf& cond_pmf,
               double theta, double a) {
  if (lengths.size() != cond_pmf.size())
    throw std::invalid_argument("p_theta: lengths and pmf size mismatch");
  if (!(a > 0.0)) throw std::invalid_argument("p_theta: a must be > 0");
  return p_value(lengths, cond_pmf, theta, WaitingMoments{a, 2.0 * a * a});
}

std::vector<double> lengths_from_theta_beta(const Pmf& cond_pmf, double theta,
                                            double beta, double a) {
  if (!(beta > 0.0)) throw std::invalid_argument("lengths_from_theta_beta: beta must be > 0");
  for (std::size_t i = 0; i < cond_pmf.size(); ++i)
    if (!(cond_pmf[i] > 0.0))
      throw std::domain_error("lengths_from_theta_beta: zero probability entry");
  return stationarity_lengths(cond_pmf, theta, beta, a, 1.0);
}

CodebookSolution solve_codebook(const Pmf& cond_pmf, const WaitingMoments& wm,
                                double kraft_budget, const SolverSettings& settings) {
  if (!(kraft_budget > 0.0 && kraft_budget <= 1.0))
    throw std::invalid_argument("solve_codebook: Kraft budget must be in (0, 1]");
  if (!(wm.mean > 0.0) || !(wm.second > 0.0))
    throw std::invalid_argument("solve_codebook: waiting moments must be positive");
  if (settings.max_outer_iterations < 1 || settings.max_inner_iterations < 1 ||
      !(settings.theta_tolerance > 0.0) || !(settings.kraft_tolerance > 0.0))
    throw std::invalid_argument("solve_codebook: invalid settings");
  check_conditional(cond_pmf, "solve_codebook");

  if (cond_pmf.size() == 1) return single_symbol_solution(cond_pmf, wm, kraft_budget);

  // Bracket: the optimal age strictly exceeds E[L], and E[L] of any
  // budget-tight code is at least the entropy shifted by the budget, so the
  // entropy is a lower bound. The entropy-length age is an upper bound by
  // feasibility of those lengths.
  std::vector<double> base = shannon_lengths(cond_pmf, kraft_budget);
  LengthMoments base_lm = length_moments(cond_pmf, base);
  double theta_lo = base_lm.mean;
  double theta_hi = age_from_moments(base_lm, wm);

  bool monotone = true;
  auto p_at = [&](double theta, InnerResult* keep) {
    InnerResult inner = solve_beta(cond_pmf, theta, wm, kraft_budget, settings);
    if (!inner.monotone) monotone = false;
    if (!inner.bracketed) return -1.0;  // budget slack: theta above optimum
    double p = p_value(inner.lengths, cond_pmf, theta, wm);
    if (keep) *keep = std::move(inner);
    return p;
  };

  // Defensive bracket expansion; mathematically the initial bracket is valid.
  double p_lo = p_at(theta_lo, nullptr);
  int expansions = 0;
  while (p_lo <= 0.0 && expansions++ < 60) {
    theta_lo = std::fmax(theta_lo * 0.5, 1e-12);
    p_lo = p_at(theta_lo, nullptr);
  }
  double p_hi = p_at(theta_hi, nullptr);
  expansions = 0;
  while (p_hi > 0.0 && expansions++ < 60) {
    theta_hi *= 2.0;
    p_hi = p_at(theta_hi, nullptr);
  }
  if (p_lo <= 0.0 || p_hi > 0.0)
    throw SolverError("outer bracket: p(theta) has the same sign at both ends");

  CodebookSolution sol;
  InnerResult at_mid;
  bool converged = false;
  int iter = 0;
  for (; iter < settings.max_outer_iterations; ++iter) {
    double mid = 0.5 * (theta_lo + theta_hi);
    double p_mid = p_at(mid, &at_mid);
    if (at_mid.bracketed &&
        std::fabs(p_mid) <= settings.theta_tolerance * std::fmax(1.0, mid * mid) &&
        std::fabs(at_mid.kraft_residual) <= settings.kraft_tolerance) {
      sol.theta = mid;
      sol.p_theta_residual = p_mid;
      converged = true;
      break;
    }
    if (p_mid > 0.0)
      theta_lo = mid;
    else
      theta_hi = mid;
  }
  if (!converged) {
    std::ostringstream os;
    os << "no convergence in " << settings.max_outer_iterations
       << " outer iterations; bracket [" << theta_lo << ", " << theta_hi << "]";
    throw SolverError(os.str());
  }

  sol.lengths = std::move(at_mid.lengths);
  sol.beta = at_mid.beta;
  sol.moments = length_moments(cond_pmf, sol.lengths);
  sol.kraft_residual = at_mid.kraft_residual;
  sol.iterations = iter + 1;
  if (!monotone)
    sol.warnings.push_back(
        "inner Kraft sum rose between bracket samples; root uniqueness relied on");
  return sol;
}

CodebookSolution solve_policy1(const Pmf& pmf, int k, double lambda,
                               const SolverSettings& settings) {
  if (!(lambda > 0.0)) throw std::invalid_argument("solve_policy1: lambda must be > 0");
  Pmf cond = conditional_topk(pmf, k);
  return solve_codebook(cond, exponential_waiting(head_mass(pmf, k), lambda), 1.0,
                        settings);
}

CodebookSolution solve_policy2(const Pmf& pmf, int k, double alpha, double lambda,
                               const SolverSettings& settings) {
  if (!(lambda > 0.0)) throw std::invalid_argument("solve_policy2: lambda must be > 0");
  Pmf cond = conditional_randomized(pmf, k, alpha);
  double q_k = head_mass(pmf, k);
  double q = q_k + alpha * (1.0 - q_k);
  return solve_codebook(cond, exponential_waiting(q, lambda), 1.0, settings);
}

CodebookSolution solve_policy3_noreset(const Pmf& pmf, int k, double lambda,
                                       double c, const SolverSettings& settings) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("solve_policy3_noreset: lambda must be > 0");
  double budget = 1.0 - std::exp2(-c);
  if (!(c > 0.0) || !(budget > 0.0))
    throw std::invalid_argument(
        "solve_policy3_noreset: need c > 0 so the fixed codeword leaves budget");
  if (k >= 1 && static_cast<std::size_t>(k) >= pmf.size())
    throw std::invalid_argument("solve_policy3_noreset: k must be < n");
  Pmf cond = conditional_topk(pmf, k);
  return solve_codebook(cond, waiting_moments_empty(head_mass(pmf, k), lambda, c),
                        budget, settings);
}

CodebookSolution solve_policy3_reset(const Pmf& pmf, int k, double lambda,
                                     const SolverSettings& settings) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("solve_policy3_reset: lambda must be > 0");
  Pmf augmented = pmf_with_empty(pmf, k);
  return solve_codebook(augmented, exponential_waiting(1.0, lambda), 1.0, settings);
}

}  // namespace agecode
