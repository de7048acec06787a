#pragma once

#include <array>
#include <functional>
#include <string>

namespace nlpme {

constexpr int kMaxDim = 3;
using Coord = std::array<double, kMaxDim>;

/// Analytic description of a symmetric Levy measure on R^N \ {0}.
///
/// Built-in kinds: the fractional kernel c_{N,alpha} |z|^{-N-alpha}, a
/// user-supplied radially symmetric density, and the zero measure. The
/// fractional normalization follows the convention
///   c_{N,alpha} = 2^alpha Gamma((N+alpha)/2) / (pi^{N/2} |Gamma(-alpha/2)|),
/// matching the Fourier-multiplier fractional Laplacian; it can be overridden
/// through the normalization field.
struct LevyMeasureSpec {
  enum class Kind { kFractional, kRadialDensity, kZero };

  Kind kind = Kind::kZero;
  int dim = 1;
  double alpha = 0.0;          // fractional order, in (0,2) for kFractional
  double normalization = 1.0;  // c_{N,alpha} for the fractional kind
  // radial profile g(s), s = |z| > 0, for kRadialDensity
  std::function<double(double)> radial_density;

  /// Pointwise density at z (zero for the zero measure).
  double density(const Coord& z) const;
  double density_radial(double s) const;

  bool is_zero() const { return kind == Kind::kZero; }
};

/// Fractional kernel with the standard normalization. alpha in (0,2), dim >= 1.
LevyMeasureSpec fractional_measure(double alpha, int dim);

/// Radially symmetric measure with density g(|z|).
LevyMeasureSpec radial_measure(std::function<double(double)> g, int dim);

LevyMeasureSpec zero_measure(int dim);

/// Standard fractional normalization constant.
double fractional_normalization(double alpha, int dim);

/// Surface area of the unit sphere in R^N.
double sphere_surface(int dim);

/// int_{|z|<r} |z|^2 dmu(z). Closed form for the fractional kind, adaptive
/// quadrature (abs 1e-12 / rel 1e-10) otherwise. Throws on divergence.
double small_ball_second_moment(const LevyMeasureSpec& spec, double r);

/// mu({|z| > r}), the mass of the measure outside radius r. Closed form for
/// the fractional kind; radial quadrature otherwise (the density must be
/// integrable at infinity).
double tail_mass(const LevyMeasureSpec& spec, double r);

/// Measure of the cell (center + (-half_width, half_width]^N) intersected
/// with {|z| > cutoff}. Refuses cells containing the singularity unless the
/// cutoff excludes it.
double cell_mass(const LevyMeasureSpec& spec, const Coord& center,
                 double half_width, double cutoff);

}  // namespace nlpme
