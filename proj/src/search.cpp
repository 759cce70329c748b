#include "agecode/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "agecode/age.hpp"

namespace agecode {

namespace {

// Index-keyed parallel map: slot i always holds fn(i), so the result does not
// depend on scheduling. fn must handle its own per-point failures.
template <typename T>
void parallel_fill(std::vector<T>& slots, int jobs,
                   const std::function<void(std::size_t)>& fn) {
  std::size_t m = slots.size();
  int workers = std::max(1, jobs);
  workers = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), m));
  if (workers <= 1) {
    for (std::size_t i = 0; i < m; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= m) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct PointOutcome {
  SweepPoint point;
  std::string failure;  // empty on success
};

SweepResult assemble(std::vector<PointOutcome> outcomes, const char* what) {
  SweepResult result;
  result.points.reserve(outcomes.size());
  for (auto& o : outcomes) {
    result.points.push_back(o.point);
    if (o.point.converged) {
      result.grid.push_back(o.point.param);
      result.ages.push_back(o.point.age);
    } else {
      std::ostringstream msg;
      msg << what << ": point " << o.point.param << " excluded: " << o.failure;
      result.warnings.push_back(msg.str());
    }
  }
  if (result.grid.empty())
    throw SolverError(std::string(what) + ": no grid point converged");
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.grid.size(); ++i)
    if (result.ages[i] < result.ages[best]) best = i;
  result.argmin_age = result.ages[best];
  for (std::size_t i = 0; i < result.grid.size(); ++i)
    if (result.ages[i] <= result.argmin_age + SweepResult::kTieTolerance)
      result.ties.push_back(result.grid[i]);
  // Smallest grid value attaining the minimum within tolerance.
  result.argmin_value = *std::min_element(result.ties.begin(), result.ties.end());
  return result;
}

SweepResult sweep_over(const std::vector<double>& grid, const char* what,
                       int jobs,
                       const std::function<CodebookSolution(double)>& solve) {
  std::vector<PointOutcome> outcomes(grid.size());
  parallel_fill(outcomes, jobs, [&](std::size_t i) {
    PointOutcome& o = outcomes[i];
    o.point.param = grid[i];
    try {
      CodebookSolution sol = solve(grid[i]);
      o.point.age = sol.theta;
      o.point.converged = true;
      o.point.iterations = sol.iterations;
    } catch (const SolverError& e) {
      o.failure = e.what();
    } catch (const std::invalid_argument& e) {
      o.failure = e.what();  // degenerate point (e.g. vanishing conditional)
    } catch (const std::domain_error& e) {
      o.failure = e.what();
    }
  });
  return assemble(std::move(outcomes), what);
}

// Ascending 0-based combination stepper; returns false after the last one.
bool next_combination(std::vector<int>& c, int n) {
  int k = static_cast<int>(c.size());
  for (int i = k - 1; i >= 0; --i) {
    if (c[static_cast<std::size_t>(i)] < n - k + i) {
      ++c[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

SweepResult sweep_k(const Pmf& pmf, double lambda, const PolicyConfig& policy,
                    int k_min, int k_max, const SolverSettings& settings,
                    int jobs) {
  int n = static_cast<int>(pmf.size());
  bool empty_policy = policy.kind == PolicyKind::EmptyNoReset ||
                      policy.kind == PolicyKind::EmptyReset;
  int k_cap = empty_policy ? n - 1 : n;
  if (k_min < 1 || k_max < k_min || k_max > k_cap)
    throw std::invalid_argument("sweep_k: range must lie within [1, " +
                                std::to_string(k_cap) + "]");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(k_max - k_min + 1));
  for (int k = k_min; k <= k_max; ++k) grid.push_back(k);
  return sweep_over(grid, "sweep_k", jobs, [&](double param) {
    int k = static_cast<int>(std::lround(param));
    switch (policy.kind) {
      case PolicyKind::HighestK:
        return solve_policy1(pmf, k, lambda, settings);
      case PolicyKind::Randomized:
        return solve_policy2(pmf, k, policy.alpha, lambda, settings);
      case PolicyKind::EmptyNoReset:
        return solve_policy3_noreset(pmf, k, lambda, policy.empty_len, settings);
      case PolicyKind::EmptyReset:
        return solve_policy3_reset(pmf, k, lambda, settings);
    }
    throw std::invalid_argument("sweep_k: unknown policy");
  });
}

SweepResult sweep_alpha(const Pmf& pmf, int k, double lambda,
                        const std::vector<double>& alpha_grid,
                        const SolverSettings& settings, int jobs) {
  if (alpha_grid.empty())
    throw std::invalid_argument("sweep_alpha: empty grid");
  for (double a : alpha_grid)
    if (!(a > 0.0) || a > 1.0)
      throw std::invalid_argument("sweep_alpha: grid values must lie in (0, 1]");
  return sweep_over(alpha_grid, "sweep_alpha", jobs, [&](double alpha) {
    return solve_policy2(pmf, k, alpha, lambda, settings);
  });
}

SweepResult sweep_empty_length(const Pmf& pmf, int k, double lambda,
                               const std::vector<double>& c_grid,
                               const SolverSettings& settings, int jobs) {
  if (c_grid.empty())
    throw std::invalid_argument("sweep_empty_length: empty grid");
  for (double c : c_grid)
    if (!(c > 0.0))
      throw std::invalid_argument("sweep_empty_length: grid values must be > 0");
  return sweep_over(c_grid, "sweep_empty_length", jobs, [&](double c) {
    return solve_policy3_noreset(pmf, k, lambda, c, settings);
  });
}

long long binomial_coefficient(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;  // exact: product of i consecutive ints
    if (result > kMaxSubsets) return kMaxSubsets + 1;
  }
  return result;
}

SelectionResult best_selection(const Pmf& pmf, int k, double lambda,
                               const SolverSettings& settings, int jobs,
                               int top_n) {
  int n = static_cast<int>(pmf.size());
  if (k < 1 || k > n)
    throw std::invalid_argument("best_selection: k must lie in [1, n]");
  if (!(lambda > 0.0))
    throw std::invalid_argument("best_selection: lambda must be > 0");
  long long count = binomial_coefficient(n, k);
  if (count > kMaxSubsets)
    throw std::invalid_argument(
        "best_selection: C(n,k) exceeds the enumeration guard of 10^6; "
        "heuristic selection is out of scope");

  // Enumerate lexicographically once so rank r maps to a fixed subset.
  std::vector<std::vector<int>> subsets;
  subsets.reserve(static_cast<std::size_t>(count));
  std::vector<int> comb(static_cast<std::size_t>(k));
  std::iota(comb.begin(), comb.end(), 0);
  do {
    subsets.push_back(comb);
  } while (next_combination(comb, n));

  struct Row {
    double age = 0.0;
    double rate = 0.0;
  };
  std::vector<Row> rows(subsets.size());
  parallel_fill(rows, jobs, [&](std::size_t r) {
    std::vector<int> one_based(subsets[r].size());
    for (std::size_t i = 0; i < one_based.size(); ++i)
      one_based[i] = subsets[r][i] + 1;
    SelectionSet sel(one_based);
    Pmf restricted = conditional_subset(pmf, sel);
    double rate = effective_rate(pmf, sel, lambda);
    CodebookSolution sol = solve_codebook(
        restricted, exponential_waiting(1.0, rate), 1.0, settings);
    rows[r].age = sol.theta;
    rows[r].rate = rate;
  });

  double min_age = rows[0].age;
  for (const Row& row : rows) min_age = std::min(min_age, row.age);

  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t keep = std::min<std::size_t>(
      order.size(), static_cast<std::size_t>(std::max(top_n, 1)));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (rows[a].age != rows[b].age)
                        return rows[a].age < rows[b].age;
                      return a < b;  // lexicographic rank breaks ties
                    });

  SelectionResult result;
  for (std::size_t i = 0; i < keep; ++i) {
    std::size_t r = order[i];
    std::vector<int> one_based(subsets[r].size());
    for (std::size_t j = 0; j < one_based.size(); ++j)
      one_based[j] = subsets[r][j] + 1;
    result.ranked_table.push_back(
        SelectionRow{SelectionSet(one_based), rows[r].rate, rows[r].age});
  }
  // First rank within tolerance of the minimum is the lexicographically
  // smallest tie, since ranks follow enumeration order.
  std::size_t winner = order[0];
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].age <= min_age + SweepResult::kTieTolerance) {
      winner = r;
      break;
    }
  }
  std::vector<int> one_based(subsets[winner].size());
  for (std::size_t j = 0; j < one_based.size(); ++j)
    one_based[j] = subsets[winner][j] + 1;
  result.selection = SelectionSet(one_based);
  result.effective_rate = rows[winner].rate;
  result.age = rows[winner].age;
  return result;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  grid.reserve(20);
  for (int i = 1; i <= 20; ++i) grid.push_back(i / 20.0);
  return grid;
}

std::vector<double> default_c_grid() {
  // 0.1 steps over [0.5, 15]; the integer points 1..15 land on this grid.
  std::vector<double> grid;
  grid.reserve(146);
  for (int i = 5; i <= 150; ++i) grid.push_back(i / 10.0);
  return grid;
}

}  // namespace agecode
