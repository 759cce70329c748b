#pragma once

#include <cstdint>
#include <vector>

#include "agecode/pmf.hpp"
#include "agecode/policy.hpp"

namespace agecode {

struct SimConfig {
  PolicyConfig policy;
  std::vector<double> lengths;  // one per encoded symbol, synthetic last
  Pmf pmf;                      // source distribution over all n realizations
  double lambda = 1.0;
  std::int64_t cycles = 1000000;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct AgeEstimate {
  double mean_age = 0.0;      // sum_Q / sum_Y
  double half_width_95 = 0.0;
  std::int64_t cycles = 0;
  double sum_Q = 0.0;
  double sum_Y = 0.0;
};

// Per-cycle sample aggregates kept alongside the estimate so the waiting and
// service processes can be checked against their closed-form moments.
struct CycleSampleStats {
  double waiting_mean = 0.0;
  double waiting_half_width_95 = 0.0;
  double waiting_second = 0.0;
  double service_mean = 0.0;
  double service_second = 0.0;
};

struct SimResult {
  AgeEstimate estimate;
  CycleSampleStats samples;
};

// Renewal-cycle estimator. Cycle j contributes Y_j and Q_j = Y_j^2/2 + Y_j S_{j+1};
// the last cycle is closed with an independent service draw. Every cycle has its
// own counter-derived random stream, so the result is a pure function of
// (config, seed) regardless of jobs.
AgeEstimate simulate(const SimConfig& config);
SimResult simulate_detailed(const SimConfig& config);

enum class EventKind {
  ArrivalBlocked,    // transmitter busy
  ArrivalDiscarded,  // idle but not selected for encoding
  ServiceStart,
  DeliveryReset,
  DeliveryNoReset,   // delivery that leaves the age untouched
};

struct TrajectoryEvent {
  double time = 0.0;
  EventKind kind = EventKind::ArrivalBlocked;
  int symbol = 0;  // 1-based realization index; k+1 for the synthetic symbol
  double age_after = 0.0;
};

struct TrajectoryResult {
  double time_average_age = 0.0;
  double half_width_95 = 0.0;  // batch-means interval, approximate
  double horizon = 0.0;
  std::int64_t deliveries = 0;
  std::vector<TrajectoryEvent> events;  // populated when record_events
};

// Event-driven cross-check of the cycle estimator: integrates the sawtooth
// age path directly over [0, horizon].
TrajectoryResult simulate_trajectory(const SimConfig& config, double horizon,
                                     bool record_events = false);

}  // namespace agecode
