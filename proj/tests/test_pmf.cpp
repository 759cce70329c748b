#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "agecode/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace agecode;

namespace {

// Frozen reference masses, computed by direct summation of i^{-s} terms in a
// separate scalar pass.
constexpr double kZipf10s1Head5 = 0.7795691640699093;
constexpr double kZipf10s1First = 0.34141715214740553;
constexpr double kZipf10s1Sub28910 = 0.626879826581764;
constexpr double kZipf10s1Sub78910 = 0.504945129386262;
constexpr double kZipf10s02Head5 = 0.5565376451708737;

double direct_zipf_entry(int n, double s, int i) {
  double norm = 0.0;
  for (int j = 1; j <= n; ++j) norm += std::pow(j, -s);
  return std::pow(i, -s) / norm;
}

}  // namespace

TEST_CASE("zipf family") {
  Pmf one = zipf_pmf(1, 0.4);
  CHECK(one.size() == 1);
  CHECK(one[0] == doctest::Approx(1.0).epsilon(1e-15));

  Pmf uniform = zipf_pmf(4, 0.0);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(uniform[i] == doctest::Approx(0.25).epsilon(1e-15));

  Pmf z = zipf_pmf(100, 0.4);
  CHECK(z.size() == 100);
  CHECK(z[0] == doctest::Approx(direct_zipf_entry(100, 0.4, 1)).epsilon(1e-14));
  CHECK(z[54] == doctest::Approx(direct_zipf_entry(100, 0.4, 55)).epsilon(1e-14));
  CHECK(z.nonincreasing());

  CHECK(head_mass(zipf_pmf(10, 1.0), 5) == doctest::Approx(kZipf10s1Head5).epsilon(1e-13));
  CHECK(zipf_pmf(10, 1.0)[0] == doctest::Approx(kZipf10s1First).epsilon(1e-13));
  CHECK(head_mass(zipf_pmf(10, 0.2), 5) == doctest::Approx(kZipf10s02Head5).epsilon(1e-13));

  CHECK_THROWS_AS(zipf_pmf(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(zipf_pmf(3, -0.5), std::invalid_argument);
}

TEST_CASE("dyadic family") {
  Pmf two = dyadic_pmf(2);
  CHECK(two[0] == 0.5);
  CHECK(two[1] == 0.5);

  Pmf three = dyadic_pmf(3);
  CHECK(three[0] == 0.5);
  CHECK(three[1] == 0.25);
  CHECK(three[2] == 0.25);

  Pmf ten = dyadic_pmf(10);
  CHECK(ten[8] == 0.001953125);
  CHECK(ten[9] == 0.001953125);  // doubled last atom
  double sum = 0.0;
  for (std::size_t i = 0; i < ten.size(); ++i) sum += ten[i];
  CHECK(sum == 1.0);  // powers of two are exact in binary

  CHECK_THROWS_AS(dyadic_pmf(1), std::invalid_argument);
}

TEST_CASE("pmf validation") {
  CHECK_THROWS_AS(Pmf({0.5, -0.1, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Pmf({0.5, 0.4}), std::invalid_argument);          // mass 0.9
  CHECK_THROWS_AS(Pmf({0.25, 0.5, 0.25}), std::invalid_argument);   // increasing
  CHECK_THROWS_AS(Pmf(std::vector<double>{}), std::invalid_argument);

  // The unordered escape hatch still enforces the mass invariant.
  Pmf increasing = Pmf::unordered({0.25, 0.75});
  CHECK(!increasing.nonincreasing());
  CHECK_THROWS_AS(Pmf::unordered({0.25, 0.5}), std::invalid_argument);
}

TEST_CASE("boundary ties") {
  Pmf ten = dyadic_pmf(10);
  CHECK(ten.boundary_tie(9));
  CHECK(!ten.boundary_tie(5));
  CHECK(!ten.boundary_tie(10));  // no entry beyond the last
  CHECK(!ten.boundary_tie(0));
}

TEST_CASE("selection sets") {
  SelectionSet sel({1, 7, 8, 9, 10});
  CHECK(sel.k() == 5);
  CHECK(sel.indices()[1] == 7);
  sel.validate_against(dyadic_pmf(10));
  CHECK_THROWS_AS(sel.validate_against(dyadic_pmf(9)), std::invalid_argument);

  CHECK_THROWS_AS(SelectionSet(std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(SelectionSet({2, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(SelectionSet({3, 2}), std::invalid_argument);
  CHECK_THROWS_AS(SelectionSet({0, 1}), std::invalid_argument);
}

TEST_CASE("head mass and effective rate") {
  Pmf three = dyadic_pmf(3);
  CHECK(head_mass(three, SelectionSet({1, 2})) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(head_mass(three, SelectionSet({1, 2, 3})) == 1.0);

  Pmf z1 = zipf_pmf(10, 1.0);
  CHECK(head_mass(z1, SelectionSet({1, 2, 8, 9, 10})) ==
        doctest::Approx(kZipf10s1Sub28910).epsilon(1e-13));
  CHECK(head_mass(z1, SelectionSet({1, 7, 8, 9, 10})) ==
        doctest::Approx(kZipf10s1Sub78910).epsilon(1e-13));

  // Prefix overload agrees with the explicit set, and saturates at 1.
  Pmf z = zipf_pmf(100, 0.4);
  CHECK(head_mass(z, 7) ==
        doctest::Approx(head_mass(z, SelectionSet({1, 2, 3, 4, 5, 6, 7}))).epsilon(1e-15));
  CHECK(head_mass(z, 100) == 1.0);
  CHECK(head_mass(zipf_pmf(100, 0.2), 100) == 1.0);
  CHECK_THROWS_AS(head_mass(z, 101), std::invalid_argument);
  CHECK_THROWS_AS(head_mass(z, -1), std::invalid_argument);

  // Adding an index strictly increases the mass of a positive pmf.
  double prev = head_mass(z1, SelectionSet({3}));
  std::vector<int> acc{3};
  for (int idx : {5, 6, 9}) {
    acc.push_back(idx);
    std::sort(acc.begin(), acc.end());
    double cur = head_mass(z1, SelectionSet(acc));
    CHECK(cur > prev);
    prev = cur;
  }

  CHECK(effective_rate(dyadic_pmf(10), SelectionSet({1, 2, 3, 4, 5}), 0.1) ==
        doctest::Approx(0.096875).epsilon(1e-15));
  CHECK(effective_rate(three, SelectionSet({1, 2, 3}), 2.5) ==
        doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("conditional top-k") {
  Pmf cond = conditional_topk(dyadic_pmf(3), 2);
  REQUIRE(cond.size() == 2);
  CHECK(cond[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(cond[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  Pmf z = zipf_pmf(100, 0.4);
  Pmf full = conditional_topk(z, 100);
  for (std::size_t i = 0; i < z.size(); ++i)
    CHECK(full[i] == doctest::Approx(z[i]).epsilon(1e-14));

  Pmf head = conditional_topk(z, 15);
  double q15 = head_mass(z, 15);
  CHECK(head[3] == doctest::Approx(z[3] / q15).epsilon(1e-14));
  double sum = 0.0;
  for (std::size_t i = 0; i < head.size(); ++i) sum += head[i];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(conditional_topk(z, 0), std::invalid_argument);
  CHECK_THROWS_AS(conditional_topk(z, 101), std::invalid_argument);
}

TEST_CASE("conditional randomized") {
  Pmf three = dyadic_pmf(3);
  Pmf same = conditional_randomized(three, 2, 1.0);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(same[i] == doctest::Approx(three[i]).epsilon(1e-15));

  // q_{2,0.5} = 0.75 + 0.5*0.25 = 0.875
  Pmf mixed = conditional_randomized(three, 2, 0.5);
  CHECK(mixed[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
  CHECK(mixed[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
  CHECK(mixed[2] == doctest::Approx(1.0 / 7.0).epsilon(1e-14));

  Pmf uniform = zipf_pmf(4, 0.0);
  Pmf half = conditional_randomized(uniform, 2, 0.5);
  CHECK(half[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(half[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(half[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(half[3] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  CHECK_THROWS_AS(conditional_randomized(three, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(conditional_randomized(three, 2, 1.5), std::invalid_argument);
}

TEST_CASE("pmf with synthetic last symbol") {
  Pmf a = pmf_with_empty(dyadic_pmf(3), 1);
  REQUIRE(a.size() == 2);
  CHECK(a[0] == 0.5);
  CHECK(a[1] == 0.5);

  Pmf b = pmf_with_empty(dyadic_pmf(10), 2);
  REQUIRE(b.size() == 3);
  CHECK(b[0] == 0.5);
  CHECK(b[1] == 0.25);
  CHECK(b[2] == doctest::Approx(0.25).epsilon(1e-14));

  Pmf z02 = zipf_pmf(10, 0.2);
  Pmf c = pmf_with_empty(z02, 5);
  REQUIRE(c.size() == 6);
  CHECK(c[5] == doctest::Approx(1.0 - kZipf10s02Head5).epsilon(1e-12));

  // The synthetic symbol keeps its slot even when heavier than the head tail.
  Pmf d = pmf_with_empty(z02, 1);
  CHECK(d[1] > d[0]);

  CHECK_THROWS_AS(pmf_with_empty(dyadic_pmf(3), 3), std::invalid_argument);
  CHECK_THROWS_AS(pmf_with_empty(dyadic_pmf(3), 0), std::invalid_argument);
}

TEST_CASE("conditional subset") {
  Pmf ten = dyadic_pmf(10);
  SelectionSet sel({1, 7, 8, 9, 10});
  Pmf cond = conditional_subset(ten, sel);
  REQUIRE(cond.size() == 5);
  double mass = head_mass(ten, sel);
  CHECK(mass == doctest::Approx(0.515625).epsilon(1e-15));
  CHECK(cond[0] == doctest::Approx(0.5 / mass).epsilon(1e-14));
  double sum = 0.0;
  for (std::size_t i = 0; i < cond.size(); ++i) sum += cond[i];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("normalize and sort") {
  NormalizedPmf sorted = normalize_and_sort({0.2, 0.5, 0.3});
  CHECK(sorted.pmf[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sorted.pmf[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(sorted.pmf[2] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(sorted.original_sum == doctest::Approx(1.0).epsilon(1e-15));
  // permutation maps sorted slots back to input positions
  CHECK(sorted.permutation[0] == 1);
  CHECK(sorted.permutation[1] == 2);
  CHECK(sorted.permutation[2] == 0);

  NormalizedPmf weights = normalize_and_sort({2.0, 3.0, 5.0});
  CHECK(weights.original_sum == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(weights.pmf[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(weights.pmf[2] == doctest::Approx(0.2).epsilon(1e-14));

  CHECK_THROWS_AS(normalize_and_sort({1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(normalize_and_sort({0.0, 0.0}), std::invalid_argument);
}
