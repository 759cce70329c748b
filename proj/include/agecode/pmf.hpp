#pragma once

#include <cstddef>
#include <vector>

namespace agecode {

// Probability mass function over realization indices 1..n, stored 0-based.
// Entries are non-increasing by construction: index order encodes "most
// probable first", which the selection policies rely on.
class Pmf {
 public:
  Pmf() = default;  // empty placeholder, not a valid distribution

  // Requires non-negative entries summing to 1 within 1e-12, non-increasing.
  explicit Pmf(std::vector<double> probs);

  // Same validation minus the ordering requirement. Used for distributions
  // whose last entry is a designated synthetic symbol that stays last
  // regardless of its mass.
  static Pmf unordered(std::vector<double> probs);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }
  bool nonincreasing() const;

  // True when entry k-1 equals entry k, so "the k most probable" is
  // ambiguous and index order is what breaks the tie.
  bool boundary_tie(int k) const;

  static constexpr double kMassTolerance = 1e-12;

 private:
  struct Unchecked {};
  Pmf(std::vector<double> probs, Unchecked);
  std::vector<double> p_;
};

// Ascending, distinct, 1-based realization indices chosen for encoding.
class SelectionSet {
 public:
  SelectionSet() = default;  // empty placeholder, not a valid selection
  explicit SelectionSet(std::vector<int> indices);
  const std::vector<int>& indices() const { return idx_; }
  int k() const { return static_cast<int>(idx_.size()); }
  void validate_against(const Pmf& pmf) const;

 private:
  std::vector<int> idx_;
};

// Result of the explicit normalize-and-sort helper. permutation[i] is the
// original 0-based position of sorted entry i.
struct NormalizedPmf {
  Pmf pmf;
  std::vector<std::size_t> permutation;
  double original_sum;
};

Pmf zipf_pmf(int n, double s);
Pmf dyadic_pmf(int n);

// Raw weights in any order: rescale to unit mass and sort non-increasing.
// Unsorted input is otherwise rejected by the Pmf constructor; reordering
// must be asked for, never silent.
NormalizedPmf normalize_and_sort(const std::vector<double>& raw);

double head_mass(const Pmf& pmf, const SelectionSet& sel);

// Mass of the k most probable symbols, clamped to 1 so ulp-level drift in the
// prefix sum cannot push an acceptance probability out of range.
double head_mass(const Pmf& pmf, int k);
double effective_rate(const Pmf& pmf, const SelectionSet& sel, double lambda);

Pmf conditional_topk(const Pmf& pmf, int k);
Pmf conditional_randomized(const Pmf& pmf, int k, double alpha);
Pmf pmf_with_empty(const Pmf& pmf, int k);

// Renormalized restriction to an arbitrary selection, most probable first.
Pmf conditional_subset(const Pmf& pmf, const SelectionSet& sel);

}  // namespace agecode
