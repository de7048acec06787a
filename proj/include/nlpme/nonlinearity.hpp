#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace nlpme {

/// Monotone continuous nonlinearity with phi(0) = 0.
///
/// Built-in kinds: identity; power zeta |zeta|^{m-1} (porous medium m > 1,
/// fast diffusion 0 < m < 1); stefan max(0, a zeta - b) - max(0, -b)
/// (normalized so phi(0) = 0); and a user-supplied monotone function.
struct Nonlinearity {
  enum class Kind { kIdentity, kPower, kStefan, kCustom };

  Kind kind = Kind::kIdentity;
  double m = 1.0;  // power exponent
  double a = 1.0;  // stefan slope (>= 0)
  double b = 0.0;  // stefan threshold
  std::function<double(double)> custom;
  // optional bound M -> Lipschitz constant on [-M, M] for custom kinds
  std::function<double(double)> custom_lipschitz;

  double operator()(double zeta) const;
};

Nonlinearity identity_nonlinearity();
Nonlinearity power_nonlinearity(double m);
Nonlinearity stefan_nonlinearity(double a, double b);
Nonlinearity custom_nonlinearity(
    std::function<double(double)> f,
    std::function<double(double)> lipschitz = nullptr);

/// Upper bound for the Lipschitz constant of phi on [-M, M]; nullopt means
/// unbounded on that range (e.g. fast diffusion at 0) — the explicit step
/// then requires regularization.
std::optional<double> lipschitz_bound(const Nonlinearity& phi, double M);

/// phi_delta(zeta) = (phi * omega_delta)(zeta) - (phi * omega_delta)(0)
///                   + delta zeta,
/// with omega a standard bump mollifier of half-width delta. Strictly
/// increasing with slope >= delta, phi_delta(0) = 0; convolution is a fixed
/// 64-node Gauss rule (exact-to-rounding for polynomial phi).
struct RegularizedNonlinearity {
  Nonlinearity base;
  double delta = 0.0;

  // Exact piecewise-linear closed form of the convolution, available for
  // kink-linear bases (stefan, identity); empty kinks + slope encodes an
  // affine fast path. Built by regularize(); falls back to the quadrature
  // sum otherwise.
  struct PiecewiseLinear {
    std::vector<double> kinks;        // sorted convolution kink positions
    std::vector<double> wsum, wksum;  // prefix sums of weights, weight*kink
    double slope = 0.0;               // base slope past each kink (a)
    double offset = 0.0;              // additive normalization
    bool valid = false;
  };
  PiecewiseLinear pwl;

  double operator()(double zeta) const;
  /// Numeric Lipschitz estimate on [-M, M] (dense difference quotients with
  /// a safety margin); always finite.
  double lipschitz_estimate(double M) const;
};

RegularizedNonlinearity regularize(const Nonlinearity& phi, double delta);

/// Solves Phi(w) = w + m phi(w) = y for the unique root of the strictly
/// (or weakly, m phi still monotone) increasing Phi; safeguarded
/// secant/bisection to |Phi(w) - y| <= tol (1 + |y|). `guess` warm-starts
/// the iteration when finite and inside the root bracket.
double phi_inverse_shifted(const std::function<double(double)>& phi, double m,
                           double y, double tol = 1e-13,
                           double guess = std::numeric_limits<double>::quiet_NaN());

}  // namespace nlpme
