#pragma once

namespace agecode {

struct WEvalReport {
  double argument = 0.0;
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;  // value*exp(value) - argument
};

// Principal branch of the Lambert W function on y >= 0.
// Halley iteration, residual bounded by 1e-12 * max(1, y).
double lambert_w0(double y);
WEvalReport lambert_w0_report(double y);

// Same function addressed by ln(y), for arguments whose exponential would
// overflow. Requires ln_y such that W > 0, i.e. ln_y > -inf is fine but the
// caller is expected to use this only for large ln_y.
double lambert_w0_from_log(double ln_y);

}  // namespace agecode
