#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "agecode/age.hpp"
#include "agecode/pmf.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace agecode;

TEST_CASE("geometric moments") {
  auto [m1a, m2a] = geometric_moments(1.0);
  CHECK(m1a == 1.0);
  CHECK(m2a == 1.0);

  auto [m1b, m2b] = geometric_moments(0.5);
  CHECK(m1b == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(m2b == doctest::Approx(6.0).epsilon(1e-15));

  auto [m1c, m2c] = geometric_moments(0.25);
  CHECK(m1c == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(m2c == doctest::Approx(28.0).epsilon(1e-15));

  CHECK_THROWS_AS(geometric_moments(0.0), std::domain_error);
  CHECK_THROWS_AS(geometric_moments(1.5), std::domain_error);
}

TEST_CASE("exponential waiting") {
  WaitingMoments a = exponential_waiting(1.0, 2.0);
  CHECK(a.mean == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a.second == doctest::Approx(0.5).epsilon(1e-15));

  WaitingMoments b = exponential_waiting(0.5, 1.0);
  CHECK(b.mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(b.second == doctest::Approx(8.0).epsilon(1e-15));

  CHECK_THROWS_AS(exponential_waiting(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(exponential_waiting(0.5, 0.0), std::domain_error);
}

TEST_CASE("exponential waiting matches sampled geometric sums") {
  // Independent sampler: geometric number of exponential interarrivals.
  auto [m1, m2] = oracle::mc_wait_geometric(0.5, 1.0, 400000, 99101);
  WaitingMoments wm = exponential_waiting(0.5, 1.0);
  CHECK(std::fabs(m1 - wm.mean) < 0.02);
  CHECK(std::fabs(m2 - wm.second) < 0.25);
}

TEST_CASE("gapped waiting moments") {
  // c = 0 collapses to the plain exponential form.
  WaitingMoments zero = waiting_moments_empty(0.7, 2.0, 0.0);
  WaitingMoments plain = exponential_waiting(0.7, 2.0);
  CHECK(zero.mean == doctest::Approx(plain.mean).epsilon(1e-15));
  CHECK(zero.second == doctest::Approx(plain.second).epsilon(1e-15));

  // E[W] = 2*(1/0.5 - 1) + 1/0.5 = 4
  // E[W^2] = (1.5*0.5/0.25)*4 + (4*0.5/0.25)*2 + 2/0.25 = 12 + 16 + 8 = 36
  WaitingMoments wm = waiting_moments_empty(0.5, 1.0, 2.0);
  CHECK(wm.mean == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(wm.second == doctest::Approx(36.0).epsilon(1e-14));

  // Near-full selection approaches a single interarrival regardless of c.
  WaitingMoments lim = waiting_moments_empty(1.0 - 1e-10, 3.0, 7.5);
  CHECK(lim.mean == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
  CHECK(lim.second == doctest::Approx(2.0 / 9.0).epsilon(1e-8));

  CHECK_THROWS_AS(waiting_moments_empty(1.0, 1.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(waiting_moments_empty(0.5, 1.0, -0.1), std::domain_error);
}

TEST_CASE("gapped waiting matches sampled slots") {
  // E[W] = 1.5*1.5 + 1/0.8 = 3.5; E[W^2] = 6*2.25 + 7.5*1.5 + 3.125 = 27.875
  WaitingMoments wm = waiting_moments_empty(0.4, 2.0, 1.5);
  CHECK(wm.mean == doctest::Approx(3.5).epsilon(1e-14));
  CHECK(wm.second == doctest::Approx(27.875).epsilon(1e-14));
  auto [m1, m2] = oracle::mc_wait_gapped(0.4, 2.0, 1.5, 400000, 424242);
  CHECK(std::fabs(m1 - wm.mean) < 0.03);
  CHECK(std::fabs(m2 - wm.second) < 0.5);
}

TEST_CASE("cycle moments") {
  CycleMoments trivial = cycle_moments(LengthMoments{0.0, 0.0}, 1.0, 1.0);
  CHECK(trivial.mean == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(trivial.second == doctest::Approx(2.0).epsilon(1e-15));

  // E[Y] = 1 + 1; E[Y^2] = 1 + 2*1*1 + 2 + 0 = 5
  CycleMoments unit = cycle_moments(LengthMoments{1.0, 1.0}, 1.0, 1.0);
  CHECK(unit.mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unit.second == doctest::Approx(5.0).epsilon(1e-15));

  // E[M] = 2, E[M^2] = 6: E[Y] = 1 + 2; E[Y^2] = 1 + 4 + 4 + 4 = 13
  CycleMoments half = cycle_moments(LengthMoments{1.0, 1.0}, 0.5, 1.0);
  CHECK(half.mean == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(half.second == doctest::Approx(13.0).epsilon(1e-15));

  CHECK_THROWS_AS(cycle_moments(LengthMoments{1.0, 0.5}, 1.0, 1.0),
                  std::domain_error);  // second < mean^2
}

TEST_CASE("cycle moments via waiting moments") {
  // The geometric-sum route and the waiting-moment route are the same model.
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::uniform_real_distribution<double> rate(0.1, 8.0);
  std::uniform_real_distribution<double> len(0.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    double q = unit(rng);
    double lambda = rate(rng);
    double l1 = len(rng);
    LengthMoments lm{l1, l1 * l1 + unit(rng)};
    CycleMoments direct = cycle_moments(lm, q, lambda);
    CycleMoments via = cycle_moments_from_waiting(lm, exponential_waiting(q, lambda));
    CHECK(direct.mean == doctest::Approx(via.mean).epsilon(1e-12));
    CHECK(direct.second == doctest::Approx(via.second).epsilon(1e-12));
    // Renewal identity: the cycle is exactly service plus waiting.
    CHECK(direct.mean ==
          doctest::Approx(lm.mean + 1.0 / (lambda * q)).epsilon(1e-12));
  }
}

TEST_CASE("age from moments") {
  // (4 + 2*1*2 + 2) / (2*(2+1)) + 2 = 10/6 + 2
  double age = age_from_moments(LengthMoments{2.0, 4.0}, WaitingMoments{1.0, 2.0});
  CHECK(age == doctest::Approx(11.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS(age_from_moments(LengthMoments{2.0, 1.0}, WaitingMoments{1.0, 2.0}),
                  std::domain_error);
  CHECK_THROWS_AS(age_from_moments(LengthMoments{1.0, 1.0}, WaitingMoments{0.0, 0.0}),
                  std::domain_error);
}

TEST_CASE("policy evaluators") {
  CHECK(age_policy1(LengthMoments{0.0, 0.0}, 1.0, 2.0) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(age_policy1(LengthMoments{1.0, 1.0}, 1.0, 1.0) ==
        doctest::Approx(2.25).epsilon(1e-15));
  CHECK(age_policy2(LengthMoments{0.0, 0.0}, 0.5, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK(age_policy3_reset(LengthMoments{0.0, 0.0}, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(age_policy3_reset(LengthMoments{1.0, 1.0}, 1.0) ==
        doctest::Approx(2.25).epsilon(1e-15));

  // Zero-length codebook with unit acceptance: age collapses to 1/lambda.
  CHECK(age_policy3_noreset(LengthMoments{0.0, 0.0}, WaitingMoments{1.0, 2.0}) ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("reduction identities") {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::uniform_real_distribution<double> rate(0.1, 10.0);
  std::uniform_real_distribution<double> len(0.1, 5.0);
  for (int i = 0; i < 300; ++i) {
    double q = unit(rng);
    double lambda = rate(rng);
    double l1 = len(rng);
    LengthMoments lm{l1, l1 * l1 + unit(rng)};

    // Gap length zero makes the empty-slot waiting identical to policy 1.
    double noreset = age_policy3_noreset(lm, waiting_moments_empty(q, lambda, 0.0));
    double p1 = age_policy1(lm, q, lambda);
    CHECK(std::fabs(noreset - p1) <= 1e-12 * std::max(1.0, p1));

    // Full acceptance makes the randomized variant policy 1 at k = n.
    double p2 = age_policy2(lm, 1.0, lambda);
    double p1full = age_policy1(lm, 1.0, lambda);
    CHECK(std::fabs(p2 - p1full) <= 1e-12 * std::max(1.0, p1full));

    // The reset variant is policy 1 with unit acceptance probability.
    double reset = age_policy3_reset(lm, lambda);
    CHECK(std::fabs(reset - p1full) <= 1e-12 * std::max(1.0, p1full));
  }
}

TEST_CASE("age properties") {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::uniform_real_distribution<double> len(0.1, 5.0);
  for (int i = 0; i < 200; ++i) {
    double q = unit(rng);
    double l1 = len(rng);
    LengthMoments lm{l1, l1 * l1 + unit(rng)};

    // Age strictly exceeds the mean codeword length.
    CHECK(age_policy1(lm, q, 1.0) > lm.mean);

    // With E[L^2] <= 2 E[L]^2 extra waiting never helps, so age strictly
    // decreases in the arrival rate. (Above that threshold a short wait can
    // lower the age, so no monotonicity claim is made in general.)
    LengthMoments calm{l1, l1 * l1 * (1.0 + unit(rng))};
    double prev = age_policy1(calm, q, 0.05);
    for (double lambda : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
      double cur = age_policy1(calm, q, lambda);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("length moments") {
  Pmf cond = conditional_topk(dyadic_pmf(10), 2);
  LengthMoments lm = length_moments(cond, {1.0, 2.0});
  CHECK(lm.mean == doctest::Approx(2.0 / 3.0 + 2.0 / 3.0).epsilon(1e-14));
  CHECK(lm.second == doctest::Approx(2.0 / 3.0 + 4.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(length_moments(cond, {1.0}), std::invalid_argument);
}
