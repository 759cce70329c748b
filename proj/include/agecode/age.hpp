#pragma once

#include <utility>
#include <vector>

#include "agecode/pmf.hpp"

namespace agecode {

// First and second moments of the codeword length, in bits and bits^2.
struct LengthMoments {
  double mean = 0.0;
  double second = 0.0;
};

// Moments of the waiting time between a delivery and the start of the next
// accepted service, in time units.
struct WaitingMoments {
  double mean = 0.0;
  double second = 0.0;
};

// Moments of a full update cycle (service plus waiting).
struct CycleMoments {
  double mean = 0.0;
  double second = 0.0;
};

LengthMoments length_moments(const Pmf& pmf, const std::vector<double>& lengths);

// (E[M], E[M^2]) for M geometric on {1,2,...} with success probability q.
std::pair<double, double> geometric_moments(double q);

// Waiting moments when every rejected arrival costs one fresh exponential
// interarrival: W is a sum of geometric-many exponentials.
WaitingMoments exponential_waiting(double q, double lambda);

// Waiting moments when each rejection additionally occupies the channel for a
// fixed c bits: W = (M-1)c + sum of M exponentials. Requires q in (0,1).
WaitingMoments waiting_moments_empty(double q_k, double lambda, double c);

// Cycle moments for service moments lm, acceptance probability q, rate lambda.
CycleMoments cycle_moments(const LengthMoments& lm, double q, double lambda);

// Generic assembly from independent service and waiting parts.
CycleMoments cycle_moments_from_waiting(const LengthMoments& lm,
                                        const WaitingMoments& wm);

// Average age for independent service/waiting renewal cycles:
//   (E[L^2] + 2 E[W] E[L] + E[W^2]) / (2 (E[L] + E[W])) + E[L].
double age_from_moments(const LengthMoments& lm, const WaitingMoments& wm);

// Policy-specific forms. All take pre-computed moments so the same evaluators
// can score solver output, baselines, and grid candidates.
double age_policy1(const LengthMoments& lm, double q_k, double lambda);
double age_policy2(const LengthMoments& lm, double q_k_alpha, double lambda);
double age_policy3_noreset(const LengthMoments& lm_cond, const WaitingMoments& wm);
double age_policy3_reset(const LengthMoments& lm_full, double lambda);

}  // namespace agecode
