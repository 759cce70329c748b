#include "agecode/lambert.hpp"

#include <cmath>
#include <stdexcept>

namespace agecode {

namespace {

constexpr int kMaxIterations = 50;
constexpr double kE = 2.718281828459045235360287;

double initial_guess(double y) {
  if (y < 1.0) return y;
  if (y >= kE) return std::log(y) - std::log(std::log(y));
  // Blend the two regimes across [1, e); both endpoints evaluate to 1.
  double t = (y - 1.0) / (kE - 1.0);
  return (1.0 - t) * y + t;
}

// One Halley step for f(w) = w e^w - y.
double halley_step(double w, double ew, double f) {
  double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
  return w - f / denom;
}

}  // namespace

WEvalReport lambert_w0_report(double y) {
  if (!(y >= 0.0)) throw std::domain_error("lambert_w0: argument must be >= 0");
  WEvalReport r;
  r.argument = y;
  if (y == 0.0) return r;

  double w = initial_guess(y);
  double tol = 1e-13 * std::fmax(1.0, y);
  for (int i = 1; i <= kMaxIterations; ++i) {
    double ew = std::exp(w);
    double f = w * ew - y;
    r.iterations = i;
    r.residual = f;
    if (std::fabs(f) <= tol) {
      r.value = w;
      return r;
    }
    double next = halley_step(w, ew, f);
    if (next == w) {  // fixed point at double precision
      r.value = w;
      return r;
    }
    w = next;
  }
  // Unreachable on y >= 0 in practice; surfacing it beats returning garbage.
  throw std::runtime_error("lambert_w0: no convergence within iteration cap");
}

double lambert_w0(double y) { return lambert_w0_report(y).value; }

double lambert_w0_from_log(double ln_y) {
  if (ln_y < 700.0) return lambert_w0(std::exp(ln_y));
  // exp(ln_y) would overflow; solve w + ln w = ln_y by Newton instead.
  double w = ln_y - std::log(ln_y);
  for (int i = 0; i < kMaxIterations; ++i) {
    double g = w + std::log(w) - ln_y;
    double next = w - g / (1.0 + 1.0 / w);
    if (next == w) break;
    w = next;
    if (std::fabs(g) <= 1e-14 * std::fabs(ln_y)) break;
  }
  return w;
}

}  // namespace agecode
