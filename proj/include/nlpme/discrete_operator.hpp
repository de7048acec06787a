#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nlpme/grid.hpp"
#include "nlpme/levy_measure.hpp"

namespace nlpme {

/// Finite symmetric stencil operator
///   L[psi](x) = sum_{beta != 0} (psi(x + h beta) - psi(x)) w_beta,
/// the discrete form shared by every builder: nonnegative weights, symmetric
/// stencil, finite total mass. Offsets are lattice multi-indices (z = h beta).
class DiscreteOperator {
 public:
  struct Entry {
    MultiIndex offset;
    double weight;
  };

  DiscreteOperator() = default;
  DiscreteOperator(int dim, double h);

  int dim() const { return dim_; }
  double h() const { return h_; }
  const std::vector<Entry>& entries() const { return entries_; }
  double total_mass() const { return total_mass_; }
  double tail_mass() const { return tail_mass_; }
  const std::string& provenance() const { return provenance_; }

  void set_tail_mass(double m) { tail_mass_ = m; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  /// Inserts the symmetric pair {+beta, -beta}. Throws on negative weight or
  /// zero offset. Accumulates if the offset already exists.
  void add_symmetric_pair(const MultiIndex& beta, double weight);
  /// Inserts one entry (caller keeps the stencil symmetric; checked by
  /// validate()).
  void add_entry(const MultiIndex& beta, double weight);

  /// Checks symmetry and nonnegativity; throws on violation.
  void validate() const;

  /// Weight at a given offset (0 if absent).
  double weight_at(const MultiIndex& beta) const;

  /// sum_beta (|h beta|^2 ^ 1) w_beta, the uniform Levy-condition functional.
  double levy_functional() const;

  DiscreteOperator scaled(double factor) const;

  friend DiscreteOperator add(const DiscreteOperator& a,
                              const DiscreteOperator& b);

 private:
  int dim_ = 1;
  double h_ = 1.0;
  std::vector<Entry> entries_;
  double total_mass_ = 0.0;
  double tail_mass_ = 0.0;
  std::string provenance_;
};

DiscreteOperator add(const DiscreteOperator& a, const DiscreteOperator& b);

/// L[psi](x_gamma) with zero extension outside the field's box.
Field apply(const DiscreteOperator& op, const Field& field);

/// Stencil sum on an analytic function at one point; with kill_tail the
/// truncated far field is accounted for as -psi(x) * tail_mass (valid when
/// psi is negligible beyond the truncation radius from x).
double apply_at(const DiscreteOperator& op, const SpaceFn& psi,
                const Coord& x, bool kill_tail = false);

// ---- builders -------------------------------------------------------------

DiscreteOperator zero_operator(int dim, double h);

/// Second-difference stencil carrying the small-ball second moment
/// (coefficient (1/2N) int_{|z|<r} |z|^2 dmu on each axis pair).
DiscreteOperator vanishing_viscosity_operator(const LevyMeasureSpec& spec,
                                              double r, double h, int dim);

/// Piecewise-constant (midpoint) quadrature of the measure outside radius r,
/// truncated at |z| <= R_tail; weight = mu((z_beta + R_h) cap {|z|>r}).
DiscreteOperator midpoint_operator(const LevyMeasureSpec& spec, double r,
                                   double h, int dim, double R_tail);

/// Tensorized hat-function quadrature weights int_{|z|>r} p_beta dmu.
DiscreteOperator multilinear_operator(const LevyMeasureSpec& spec, double r,
                                      double h, int dim, double R_tail);

/// Composite Lagrange quadrature of order k (1 <= k <= 7) against the
/// measure's pointwise density; 1D.
DiscreteOperator lagrange_operator(const LevyMeasureSpec& spec, int order,
                                   double r, double h, int dim, double R_tail);

/// alpha/2 power of the standard discrete Laplacian (heat-semigroup weights).
DiscreteOperator discrete_fractional_laplacian(double alpha, double h, int dim,
                                               double tol, double R_tail);

/// Plain second-difference Laplacian, weights 1/h^2 at +-h e_i.
DiscreteOperator local_laplacian_operator(double h, int dim);

/// tr(sigma sigma^T D^2) discretization: +-eta sigma_i second differences
/// with multilinear interpolation of the off-grid points; weights / eta^2.
/// sigma is N x P column-major (columns sigma_i of length dim).
DiscreteOperator sigma_operator(const std::vector<Coord>& sigma_columns,
                                double h, int dim, double eta);

// ---- exact semigroup weights, 1D ------------------------------------------

/// K_{m,1} for the alpha/2 power of the 1D discrete Laplacian (h = 1); exact
/// Gamma-ratio evaluation of the Bessel-integral weights.
double fractional_weight_1d(double alpha, int m);

/// Direct quadrature of the heat-semigroup integral for the same weight
/// (series/recurrence Bessel evaluation, split integral); refine >= 1 doubles
/// the quadrature resolution. Used as an independent route in tests.
double fractional_weight_quadrature(double alpha, const MultiIndex& beta,
                                    int dim, double tol, int refine = 0);

/// Text dump: header "dim h total_mass tail_mass", then one line per entry
/// "b1 ... bN w".
void dump_operator(std::ostream& out, const DiscreteOperator& op);

}  // namespace nlpme
