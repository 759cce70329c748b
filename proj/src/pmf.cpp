#include "agecode/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace agecode {

namespace {

void check_mass(const std::vector<double>& p) {
  if (p.empty()) throw std::invalid_argument("pmf: empty probability vector");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw std::invalid_argument("pmf: negative or NaN entry");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > Pmf::kMassTolerance)
    throw std::invalid_argument("pmf: entries sum to " + std::to_string(sum) +
                                ", expected 1 within 1e-12");
}

// Per-entry division leaves O(n) ulp drift in the total; fold it back so the
// mass invariant holds at any n.
void renormalize(std::vector<double>& p) {
  double sum = 0.0;
  for (double v : p) sum += v;
  if (sum != 1.0)
    for (double& v : p) v /= sum;
}

}  // namespace

Pmf::Pmf(std::vector<double> probs) : p_(std::move(probs)) {
  check_mass(p_);
  if (!nonincreasing())
    throw std::invalid_argument(
        "pmf: entries must be non-increasing; use normalize_and_sort for raw weights");
}

Pmf::Pmf(std::vector<double> probs, Unchecked) : p_(std::move(probs)) {
  check_mass(p_);
}

Pmf Pmf::unordered(std::vector<double> probs) {
  return Pmf(std::move(probs), Unchecked{});
}

bool Pmf::nonincreasing() const {
  for (std::size_t i = 1; i < p_.size(); ++i)
    if (p_[i] > p_[i - 1]) return false;
  return true;
}

bool Pmf::boundary_tie(int k) const {
  if (k < 1 || static_cast<std::size_t>(k) >= p_.size()) return false;
  return p_[k - 1] == p_[k];
}

SelectionSet::SelectionSet(std::vector<int> indices) : idx_(std::move(indices)) {
  if (idx_.empty()) throw std::invalid_argument("selection: empty index set");
  if (!std::is_sorted(idx_.begin(), idx_.end()))
    throw std::invalid_argument("selection: indices must be ascending");
  if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end())
    throw std::invalid_argument("selection: duplicate index");
  if (idx_.front() < 1) throw std::invalid_argument("selection: indices are 1-based");
}

void SelectionSet::validate_against(const Pmf& pmf) const {
  if (idx_.back() > static_cast<int>(pmf.size()))
    throw std::invalid_argument("selection: index exceeds pmf size");
}

Pmf zipf_pmf(int n, double s) {
  if (n < 1) throw std::invalid_argument("zipf_pmf: n must be >= 1");
  if (s < 0.0 || !std::isfinite(s))
    throw std::invalid_argument("zipf_pmf: s must be finite and >= 0");
  std::vector<double> p(n);
  double norm = 0.0;
  for (int i = n; i >= 1; --i) norm += std::pow(i, -s);  // small terms first
  for (int i = 1; i <= n; ++i) p[i - 1] = std::pow(i, -s) / norm;
  renormalize(p);
  return Pmf(std::move(p));
}

Pmf dyadic_pmf(int n) {
  if (n < 2) throw std::invalid_argument("dyadic_pmf: n must be >= 2");
  std::vector<double> p(n);
  for (int i = 1; i < n; ++i) p[i - 1] = std::ldexp(1.0, -i);
  p[n - 1] = std::ldexp(1.0, -(n - 1));  // doubled last atom, exact unit mass
  return Pmf(std::move(p));
}

NormalizedPmf normalize_and_sort(const std::vector<double>& raw) {
  if (raw.empty()) throw std::invalid_argument("normalize_and_sort: empty input");
  double sum = 0.0;
  for (double v : raw) {
    if (!(v >= 0.0))
      throw std::invalid_argument("normalize_and_sort: negative or NaN weight");
    sum += v;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("normalize_and_sort: zero total mass");

  std::vector<std::size_t> perm(raw.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&raw](std::size_t a, std::size_t b) { return raw[a] > raw[b]; });

  std::vector<double> p(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) p[i] = raw[perm[i]] / sum;
  // Guard against rounding drift past the constructor tolerance.
  double scaled = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= scaled;
  return NormalizedPmf{Pmf(std::move(p)), std::move(perm), sum};
}

double head_mass(const Pmf& pmf, const SelectionSet& sel) {
  sel.validate_against(pmf);
  double mass = 0.0;
  for (int i : sel.indices()) mass += pmf[i - 1];
  return std::min(mass, 1.0);
}

double head_mass(const Pmf& pmf, int k) {
  if (k < 0 || static_cast<std::size_t>(k) > pmf.size())
    throw std::invalid_argument("head_mass: k out of range");
  double mass = 0.0;
  for (int i = 0; i < k; ++i) mass += pmf[static_cast<std::size_t>(i)];
  return std::min(mass, 1.0);
}

double effective_rate(const Pmf& pmf, const SelectionSet& sel, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("effective_rate: lambda must be > 0");
  return lambda * head_mass(pmf, sel);
}

Pmf conditional_topk(const Pmf& pmf, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > pmf.size())
    throw std::invalid_argument("conditional_topk: k out of range");
  double q = 0.0;
  for (int i = 0; i < k; ++i) q += pmf[i];
  std::vector<double> p(k);
  for (int i = 0; i < k; ++i) p[i] = pmf[i] / q;
  renormalize(p);
  return Pmf(std::move(p));
}

Pmf conditional_randomized(const Pmf& pmf, int k, double alpha) {
  if (k < 1 || static_cast<std::size_t>(k) > pmf.size())
    throw std::invalid_argument("conditional_randomized: k out of range");
  if (alpha == 0.0)
    throw std::invalid_argument(
        "conditional_randomized: alpha = 0 never encodes the tail; use the "
        "highest-k policy instead");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("conditional_randomized: alpha must be in (0, 1]");
  double q_k = 0.0;
  for (int i = 0; i < k; ++i) q_k += pmf[i];
  double q = q_k + alpha * (1.0 - q_k);
  std::vector<double> p(pmf.size());
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    double w = static_cast<int>(i) < k ? pmf[i] : alpha * pmf[i];
    p[i] = w / q;
  }
  renormalize(p);
  return Pmf(std::move(p));
}

Pmf pmf_with_empty(const Pmf& pmf, int k) {
  if (k < 1 || static_cast<std::size_t>(k) >= pmf.size())
    throw std::invalid_argument(
        "pmf_with_empty: k must leave at least one unencoded realization");
  std::vector<double> p(k + 1);
  double q = 0.0;
  for (int i = 0; i < k; ++i) {
    p[i] = pmf[i];
    q += pmf[i];
  }
  p[k] = 1.0 - q;  // stays last even when it outweighs the head
  return Pmf::unordered(std::move(p));
}

Pmf conditional_subset(const Pmf& pmf, const SelectionSet& sel) {
  sel.validate_against(pmf);
  double mass = head_mass(pmf, sel);
  if (!(mass > 0.0)) throw std::invalid_argument("conditional_subset: zero subset mass");
  std::vector<double> p;
  p.reserve(sel.indices().size());
  for (int i : sel.indices()) p.push_back(pmf[i - 1] / mass);
  renormalize(p);
  return Pmf(std::move(p));
}

}  // namespace agecode
