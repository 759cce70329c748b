#include "agecode/age.hpp"

#include <cmath>
#include <stdexcept>

namespace agecode {

namespace {

void check_rate(double lambda, const char* who) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::domain_error(std::string(who) + ": lambda must be finite and > 0");
}

void check_moments(double mean, double second, const char* who) {
  if (!(mean >= 0.0) || !(second >= 0.0) || second + 1e-12 < mean * mean)
    throw std::domain_error(std::string(who) + ": invalid moment pair");
}

}  // namespace

LengthMoments length_moments(const Pmf& pmf, const std::vector<double>& lengths) {
  if (pmf.size() != lengths.size())
    throw std::invalid_argument("length_moments: pmf and lengths size mismatch");
  LengthMoments lm;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    lm.mean += pmf[i] * lengths[i];
    lm.second += pmf[i] * lengths[i] * lengths[i];
  }
  return lm;
}

std::pair<double, double> geometric_moments(double q) {
  if (!(q > 0.0 && q <= 1.0))
    throw std::domain_error("geometric_moments: q must be in (0, 1]");
  return {1.0 / q, (2.0 - q) / (q * q)};
}

WaitingMoments exponential_waiting(double q, double lambda) {
  check_rate(lambda, "exponential_waiting");
  if (!(q > 0.0 && q <= 1.0))
    throw std::domain_error("exponential_waiting: q must be in (0, 1]");
  // Geometric sum of exponentials is exponential with rate lambda*q.
  double a = 1.0 / (lambda * q);
  return WaitingMoments{a, 2.0 * a * a};
}

WaitingMoments waiting_moments_empty(double q_k, double lambda, double c) {
  check_rate(lambda, "waiting_moments_empty");
  if (!(q_k > 0.0 && q_k < 1.0))
    throw std::domain_error(
        "waiting_moments_empty: q must be in (0, 1); a full selection leaves "
        "no unencoded mass");
  if (!(c >= 0.0)) throw std::domain_error("waiting_moments_empty: c must be >= 0");
  double q2 = q_k * q_k;
  WaitingMoments wm;
  wm.mean = c * (1.0 / q_k - 1.0) + 1.0 / (lambda * q_k);
  wm.second = ((2.0 - q_k) * (1.0 - q_k) / q2) * c * c +
              (4.0 * (1.0 - q_k) / (lambda * q2)) * c +
              2.0 / (lambda * lambda * q2);
  return wm;
}

CycleMoments cycle_moments(const LengthMoments& lm, double q, double lambda) {
  check_rate(lambda, "cycle_moments");
  check_moments(lm.mean, lm.second, "cycle_moments");
  auto [m1, m2] = geometric_moments(q);
  double z1 = 1.0 / lambda;
  double z2 = 2.0 / (lambda * lambda);
  CycleMoments cm;
  cm.mean = lm.mean + m1 * z1;
  cm.second = lm.second + 2.0 * m1 * z1 * lm.mean + m1 * z2 + (m2 - m1) * z1 * z1;
  return cm;
}

CycleMoments cycle_moments_from_waiting(const LengthMoments& lm,
                                        const WaitingMoments& wm) {
  check_moments(lm.mean, lm.second, "cycle_moments_from_waiting");
  check_moments(wm.mean, wm.second, "cycle_moments_from_waiting");
  // Service and waiting are independent within a cycle.
  return CycleMoments{lm.mean + wm.mean,
                      lm.second + 2.0 * lm.mean * wm.mean + wm.second};
}

double age_from_moments(const LengthMoments& lm, const WaitingMoments& wm) {
  check_moments(lm.mean, lm.second, "age_from_moments");
  if (!(wm.mean > 0.0)) throw std::domain_error("age_from_moments: waiting mean <= 0");
  return (lm.second + 2.0 * wm.mean * lm.mean + wm.second) /
             (2.0 * (lm.mean + wm.mean)) +
         lm.mean;
}

double age_policy1(const LengthMoments& lm, double q_k, double lambda) {
  return age_from_moments(lm, exponential_waiting(q_k, lambda));
}

double age_policy2(const LengthMoments& lm, double q_k_alpha, double lambda) {
  return age_from_moments(lm, exponential_waiting(q_k_alpha, lambda));
}

double age_policy3_noreset(const LengthMoments& lm_cond, const WaitingMoments& wm) {
  return age_from_moments(lm_cond, wm);
}

double age_policy3_reset(const LengthMoments& lm_full, double lambda) {
  // Every delivery resets the age, so waiting is a single interarrival.
  return age_from_moments(lm_full, exponential_waiting(1.0, lambda));
}

}  // namespace agecode
