#pragma once

namespace nlpme {

/// Gamma function on the real line (poles at 0, -1, -2, ... excluded).
/// Lanczos approximation, relative accuracy better than 1e-13 on the
/// ranges used by the operator builders.
double gamma_fn(double x);

double log_gamma(double x);  // x > 0

/// Exponentially scaled modified Bessel function of the first kind,
/// ive(m, x) = e^{-x} I_m(x), for integer order m >= 0 and x >= 0.
/// Backward (Miller) recurrence for moderate x, asymptotic expansion for
/// large x/m^2; absolute accuracy ~1e-14.
double bessel_ive(int m, double x);

}  // namespace nlpme
