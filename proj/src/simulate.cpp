#include "agecode/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace agecode {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr double kT95Df31 = 2.039513446396408;
constexpr std::int64_t kBlockCycles = 16384;
constexpr int kTrajectoryBatches = 32;
constexpr std::uint64_t kTrajectoryTag = 0x74726a6563746f72ULL;

// SplitMix64. Every cycle index owns its own stream derived from (seed, index),
// so results are a pure function of the config regardless of thread count.
struct Stream {
  std::uint64_t state;

  explicit Stream(std::uint64_t s) : state(s) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + index * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double exponential(Stream& s, double rate) {
  return -std::log1p(-s.next_unit()) / rate;
}

// The four policies share one cycle shape: the delivered symbol is drawn from
// the conditional pmf (first draw, so its stream position is fixed), then
// M ~ Geometric(q) idle gaps Exp(lambda), plus gap_cost per failed attempt.
struct CyclePlan {
  std::vector<double> cdf;
  std::vector<double> lengths;
  double q = 1.0;
  double gap_cost = 0.0;
  double lambda = 1.0;
  bool reset_on_empty = true;  // trajectory only
  int k = 0;
  int n = 0;
  double alpha = 1.0;
};

std::size_t pick(const std::vector<double>& cdf, double u) {
  std::size_t i = static_cast<std::size_t>(
      std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  return std::min(i, cdf.size() - 1);
}

void check_lengths(const std::vector<double>& lengths, std::size_t want,
                   const char* policy) {
  if (lengths.size() != want)
    throw std::invalid_argument(std::string("simulate: ") + policy +
                                " expects " + std::to_string(want) +
                                " codeword lengths, got " +
                                std::to_string(lengths.size()));
  for (double l : lengths)
    if (!(l >= 0.0) || !std::isfinite(l))
      throw std::invalid_argument("simulate: codeword lengths must be finite and >= 0");
}

CyclePlan make_plan(const SimConfig& config) {
  const Pmf& pmf = config.pmf;
  int n = static_cast<int>(pmf.size());
  int k = config.policy.k;
  if (!(config.lambda > 0.0))
    throw std::invalid_argument("simulate: lambda must be > 0");
  if (config.cycles < 1)
    throw std::invalid_argument("simulate: cycles must be >= 1");

  CyclePlan plan;
  plan.lambda = config.lambda;
  plan.lengths = config.lengths;
  plan.k = k;
  plan.n = n;
  double q_k = 0.0;

  switch (config.policy.kind) {
    case PolicyKind::HighestK: {
      if (k < 1 || k > n)
        throw std::invalid_argument("simulate: k must lie in [1, n]");
      check_lengths(config.lengths, static_cast<std::size_t>(k), "highest-k");
      Pmf cond = conditional_topk(pmf, k);
      plan.cdf.assign(cond.probs().begin(), cond.probs().end());
      plan.q = head_mass(pmf, k);
      break;
    }
    case PolicyKind::Randomized: {
      if (k < 1 || k > n)
        throw std::invalid_argument("simulate: k must lie in [1, n]");
      if (!(config.policy.alpha > 0.0) || config.policy.alpha > 1.0)
        throw std::invalid_argument("simulate: alpha must lie in (0, 1]");
      check_lengths(config.lengths, static_cast<std::size_t>(n), "randomized");
      Pmf cond = conditional_randomized(pmf, k, config.policy.alpha);
      plan.cdf.assign(cond.probs().begin(), cond.probs().end());
      q_k = head_mass(pmf, k);
      plan.q = q_k + config.policy.alpha * (1.0 - q_k);
      plan.alpha = config.policy.alpha;
      break;
    }
    case PolicyKind::EmptyNoReset: {
      if (k < 1 || k >= n)
        throw std::invalid_argument("simulate: k must lie in [1, n-1]");
      if (!(config.policy.empty_len > 0.0))
        throw std::invalid_argument("simulate: empty-symbol length must be > 0");
      check_lengths(config.lengths, static_cast<std::size_t>(k), "empty-noreset");
      Pmf cond = conditional_topk(pmf, k);
      plan.cdf.assign(cond.probs().begin(), cond.probs().end());
      plan.q = head_mass(pmf, k);
      plan.gap_cost = config.policy.empty_len;
      plan.reset_on_empty = false;
      break;
    }
    case PolicyKind::EmptyReset: {
      if (k < 1 || k >= n)
        throw std::invalid_argument("simulate: k must lie in [1, n-1]");
      check_lengths(config.lengths, static_cast<std::size_t>(k) + 1, "empty-reset");
      Pmf cond = pmf_with_empty(pmf, k);
      plan.cdf.assign(cond.probs().begin(), cond.probs().end());
      plan.q = 1.0;
      break;
    }
  }
  // Prefix sums in place.
  for (std::size_t i = 1; i < plan.cdf.size(); ++i) plan.cdf[i] += plan.cdf[i - 1];
  return plan;
}

struct CycleDraw {
  double service = 0.0;
  double waiting = 0.0;
};

CycleDraw draw_cycle(const CyclePlan& plan, Stream& s) {
  CycleDraw d;
  d.service = plan.lengths[pick(plan.cdf, s.next_unit())];
  std::int64_t m = 1;
  if (plan.q < 1.0) {
    double u = s.next_unit();
    m = 1 + static_cast<std::int64_t>(
                std::floor(std::log1p(-u) / std::log1p(-plan.q)));
    if (m < 1) m = 1;
  }
  double w = 0.0;
  for (std::int64_t i = 0; i < m; ++i) w += exponential(s, plan.lambda);
  d.waiting = w + static_cast<double>(m - 1) * plan.gap_cost;
  return d;
}

struct BlockSums {
  std::int64_t n = 0;
  double Y = 0.0, Q = 0.0;
  double YY = 0.0, QQ = 0.0, QY = 0.0;
  // lag-1 cross sums over adjacent in-block pairs (j, j+1)
  double lagYY = 0.0, lagQQ = 0.0, lagQY = 0.0, lagYQ = 0.0;
  double first_Y = 0.0, first_Q = 0.0, last_Y = 0.0, last_Q = 0.0;
  double W = 0.0, WW = 0.0, S = 0.0, SS = 0.0;
};

// Cycles [a, e); cycle e is touched only for its service draw, which closes
// Q_{e-1} with the same value the next block derives for itself.
BlockSums run_block(const CyclePlan& plan, std::uint64_t seed, std::int64_t a,
                    std::int64_t e) {
  BlockSums bs;
  Stream first(stream_seed(seed, static_cast<std::uint64_t>(a)));
  CycleDraw cur = draw_cycle(plan, first);
  double pending_Y = cur.waiting + cur.service;
  bs.W += cur.waiting;
  bs.WW += cur.waiting * cur.waiting;
  bs.S += cur.service;
  bs.SS += cur.service * cur.service;
  bool have_prev = false;
  double prev_Y = 0.0, prev_Q = 0.0;
  for (std::int64_t j = a + 1; j <= e; ++j) {
    Stream s(stream_seed(seed, static_cast<std::uint64_t>(j)));
    CycleDraw next = draw_cycle(plan, s);
    double Y = pending_Y;
    double Q = 0.5 * Y * Y + Y * next.service;
    bs.n += 1;
    bs.Y += Y;
    bs.Q += Q;
    bs.YY += Y * Y;
    bs.QQ += Q * Q;
    bs.QY += Q * Y;
    if (have_prev) {
      bs.lagYY += prev_Y * Y;
      bs.lagQQ += prev_Q * Q;
      bs.lagQY += prev_Q * Y;
      bs.lagYQ += prev_Y * Q;
    } else {
      bs.first_Y = Y;
      bs.first_Q = Q;
    }
    bs.last_Y = Y;
    bs.last_Q = Q;
    prev_Y = Y;
    prev_Q = Q;
    have_prev = true;
    if (j < e) {
      bs.W += next.waiting;
      bs.WW += next.waiting * next.waiting;
      bs.S += next.service;
      bs.SS += next.service * next.service;
      pending_Y = next.waiting + next.service;
    }
  }
  return bs;
}

}  // namespace

SimResult simulate_detailed(const SimConfig& config) {
  CyclePlan plan = make_plan(config);
  std::int64_t m = config.cycles;
  std::int64_t nblocks = (m + kBlockCycles - 1) / kBlockCycles;
  std::vector<BlockSums> blocks(static_cast<std::size_t>(nblocks));

  int workers = std::max(1, config.jobs);
  workers = static_cast<int>(std::min<std::int64_t>(workers, nblocks));
  auto fill = [&](std::size_t b) {
    std::int64_t a = static_cast<std::int64_t>(b) * kBlockCycles;
    std::int64_t e = std::min(a + kBlockCycles, m);
    blocks[b] = run_block(plan, config.seed, a, e);
  };
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks.size(); ++b) fill(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
      for (;;) {
        std::size_t b = next.fetch_add(1);
        if (b >= blocks.size()) return;
        try {
          fill(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  // Merge in block order; the pair straddling each block boundary completes
  // the lag-1 sums.
  BlockSums total;
  bool have_last = false;
  double last_Y = 0.0, last_Q = 0.0;
  for (const BlockSums& bs : blocks) {
    total.n += bs.n;
    total.Y += bs.Y;
    total.Q += bs.Q;
    total.YY += bs.YY;
    total.QQ += bs.QQ;
    total.QY += bs.QY;
    total.lagYY += bs.lagYY;
    total.lagQQ += bs.lagQQ;
    total.lagQY += bs.lagQY;
    total.lagYQ += bs.lagYQ;
    total.W += bs.W;
    total.WW += bs.WW;
    total.S += bs.S;
    total.SS += bs.SS;
    if (have_last) {
      total.lagYY += last_Y * bs.first_Y;
      total.lagQQ += last_Q * bs.first_Q;
      total.lagQY += last_Q * bs.first_Y;
      total.lagYQ += last_Y * bs.first_Q;
    }
    last_Y = bs.last_Y;
    last_Q = bs.last_Q;
    have_last = true;
  }

  double n = static_cast<double>(total.n);
  double mean_Y = total.Y / n;
  double ratio = total.Q / total.Y;

  SimResult result;
  result.estimate.mean_age = ratio;
  result.estimate.cycles = total.n;
  result.estimate.sum_Q = total.Q;
  result.estimate.sum_Y = total.Y;

  // Delta-method interval for the renewal-reward ratio. With
  // D_j = Q_j - ratio * Y_j (mean zero by construction),
  //   se^2 = (C0 + 2 C1) / (n * mean_Y^2),
  // where C1 is the lag-1 autocovariance: consecutive cycles share S_{j+1},
  // so the D_j form a 1-dependent sequence.
  if (total.n >= 2) {
    double c0 =
        (total.QQ - 2.0 * ratio * total.QY + ratio * ratio * total.YY) / n;
    double lag = total.lagQQ - ratio * (total.lagQY + total.lagYQ) +
                 ratio * ratio * total.lagYY;
    double c1 = lag / (n - 1.0);
    double var = std::max(0.0, c0 + 2.0 * c1) / (n * mean_Y * mean_Y);
    result.estimate.half_width_95 = kZ95 * std::sqrt(var);
  }

  result.samples.waiting_mean = total.W / n;
  result.samples.waiting_second = total.WW / n;
  result.samples.service_mean = total.S / n;
  result.samples.service_second = total.SS / n;
  if (total.n >= 2) {
    double var_w = std::max(
        0.0, result.samples.waiting_second -
                 result.samples.waiting_mean * result.samples.waiting_mean);
    result.samples.waiting_half_width_95 = kZ95 * std::sqrt(var_w / n);
  }
  return result;
}

AgeEstimate simulate(const SimConfig& config) {
  return simulate_detailed(config).estimate;
}

TrajectoryResult simulate_trajectory(const SimConfig& config, double horizon,
                                     bool record_events) {
  CyclePlan plan = make_plan(config);
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("simulate_trajectory: horizon must be > 0");

  // Full-alphabet CDF; the plan's conditional CDF is not used here because the
  // trajectory draws raw arrivals and applies the selection rule explicitly.
  std::vector<double> full_cdf(config.pmf.probs());
  for (std::size_t i = 1; i < full_cdf.size(); ++i)
    full_cdf[i] += full_cdf[i - 1];

  Stream s(stream_seed(config.seed ^ kTrajectoryTag, 0));
  TrajectoryResult result;
  result.horizon = horizon;

  double batch_width = horizon / kTrajectoryBatches;
  std::vector<double> batch_area(kTrajectoryBatches, 0.0);
  double cursor = 0.0;  // time up to which area is accumulated
  double gen = 0.0;     // generation time of the freshest delivered update

  auto advance = [&](double to) {
    double t0 = cursor;
    double t1 = std::min(to, horizon);
    while (t0 < t1) {
      int b = std::min(static_cast<int>(t0 / batch_width),
                       kTrajectoryBatches - 1);
      double end = std::min(t1, (b + 1) * batch_width);
      batch_area[static_cast<std::size_t>(b)] +=
          (end - t0) * (0.5 * (t0 + end) - gen);
      t0 = end;
    }
    cursor = std::max(cursor, t1);
  };
  auto log_event = [&](EventKind kind, double t, int symbol, double age) {
    if (record_events)
      result.events.push_back(TrajectoryEvent{t, kind, symbol, age});
  };

  int k = plan.k;
  double next_arrival = exponential(s, plan.lambda);
  bool cut_short = false;
  while (next_arrival < horizon && !cut_short) {
    double t_arr = next_arrival;
    int sym = static_cast<int>(pick(full_cdf, s.next_unit()));  // 0-based
    bool encode = false;
    bool is_empty = false;
    switch (config.policy.kind) {
      case PolicyKind::HighestK:
        encode = sym < k;
        break;
      case PolicyKind::Randomized:
        encode = sym < k || s.next_unit() < plan.alpha;
        break;
      case PolicyKind::EmptyNoReset:
      case PolicyKind::EmptyReset:
        encode = true;
        is_empty = sym >= k;
        break;
    }
    if (!encode) {
      advance(t_arr);
      log_event(EventKind::ArrivalDiscarded, t_arr, sym + 1, t_arr - gen);
      next_arrival = t_arr + exponential(s, plan.lambda);
      continue;
    }

    double service;
    int logged_sym;
    if (is_empty) {
      service = config.policy.kind == PolicyKind::EmptyReset
                    ? plan.lengths[static_cast<std::size_t>(k)]
                    : plan.gap_cost;
      logged_sym = k + 1;
    } else {
      service = plan.lengths[static_cast<std::size_t>(sym)];
      logged_sym = sym + 1;
    }
    advance(t_arr);
    log_event(EventKind::ServiceStart, t_arr, logged_sym, t_arr - gen);
    double t_done = t_arr + service;

    // Arrivals during service are lost; the first one past the end of service
    // is the next arrival the idle server sees.
    double ta = t_arr + exponential(s, plan.lambda);
    while (ta < t_done && ta < horizon) {
      int blocked_sym = static_cast<int>(pick(full_cdf, s.next_unit()));
      log_event(EventKind::ArrivalBlocked, ta, blocked_sym + 1, ta - gen);
      ta += exponential(s, plan.lambda);
    }
    if (t_done >= horizon) {
      cut_short = true;
      break;
    }
    advance(t_done);
    bool resets = !is_empty || plan.reset_on_empty;
    if (resets) {
      log_event(EventKind::DeliveryReset, t_done, logged_sym, service);
      gen = t_arr;
    } else {
      log_event(EventKind::DeliveryNoReset, t_done, logged_sym, t_done - gen);
    }
    result.deliveries += 1;
    next_arrival = ta;
  }
  advance(horizon);

  double total = 0.0;
  for (double a : batch_area) total += a;
  result.time_average_age = total / horizon;

  double mean_batch = 0.0;
  for (double a : batch_area) mean_batch += a / batch_width;
  mean_batch /= kTrajectoryBatches;
  double var = 0.0;
  for (double a : batch_area) {
    double d = a / batch_width - mean_batch;
    var += d * d;
  }
  var /= (kTrajectoryBatches - 1);
  result.half_width_95 = kT95Df31 * std::sqrt(var / kTrajectoryBatches);
  return result;
}

}  // namespace agecode
