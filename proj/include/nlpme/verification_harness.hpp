#pragma once

#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nlpme/levy_measure.hpp"
#include "nlpme/time_stepper.hpp"

namespace nlpme {

struct LteReport {
  std::string name;
  double alpha = 0.0;                  // fractional order (0 when not used)
  std::vector<double> hs, rs, errors;  // per level
  double observed_order = 0.0;         // LS slope over the finest <= 4 levels
  double predicted_order = 0.0;
  bool degenerate = false;  // all errors at rounding level; order undefined
};

struct ConvergenceReport {
  std::vector<double> hs;
  std::vector<double> l1_errors, linf_errors;  // per level (or per h-pair)
  double l1_rate = 0.0, linf_rate = 0.0;
};

struct PropertyCheck {
  std::string name;
  double violation = 0.0;  // measured worst violation magnitude
  double tolerance = 0.0;
  bool pass = false;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  bool all_pass() const;
};

struct EquicontinuityEstimate {
  std::vector<double> gaps;          // t_j - t_{j-k}
  std::vector<double> time_modulus;  // sup over pairs at each gap, l1
  double space_modulus = 0.0;        // lambda at one-cell shift
};

/// High-accuracy reference for the Levy part: symmetrized principal value
///   int_0^inf (psi(x+z) + psi(x-z) - 2 psi(x)) dmu(z)
/// split at |z| = 1, far part mapped by u = 1/z, evaluated at two quadrature
/// refinement levels and accepted when they agree to 1e-9 (else throws).
/// 1D measures only.
std::vector<double> reference_operator_apply(const LevyMeasureSpec& spec,
                                             const SpaceFn& psi,
                                             const std::vector<Coord>& points);

/// Reference tr(sigma sigma^T D^2 psi)(x) by fourth-order central second
/// differences along each column (exact for quadratics to rounding).
double reference_sigma_apply(const std::vector<Coord>& sigma_columns,
                             const SpaceFn& psi, const Coord& x, int dim);

using OperatorBuilder = std::function<DiscreteOperator(double h, double r)>;

/// L1 LTE study: for each (h, r) level, E = h sum over the h-grid of
/// [-eval_half, eval_half] of |L^h[psi](x) - reference(x)|, with the
/// operator's truncated far field folded in as -psi(x) * tail_mass.
LteReport lte_study(const std::string& name, const OperatorBuilder& builder,
                    const LevyMeasureSpec& spec, const SpaceFn& psi,
                    const std::vector<std::pair<double, double>>& schedule,
                    double predicted_order, double eval_half = 3.0);

/// One randomized comparison pair for the property suite.
struct PairedData {
  Field u0, v0;
  SpaceTimeFn f, g;  // may be null (zero source)
};

/// Monotonicity (on ordered pairs), L1-contraction, L1/Linf stability,
/// conservation, over full runs of the given scheme on each pair; the
/// violation tolerance is 10 * elliptic tol * J, mass drift 1e-7 relative.
PropertyReport property_suite(const SchemeConfig& config,
                              const std::vector<PairedData>& pairs);

/// Self-convergence: consecutive runs at h and h/2 are compared at the
/// coarse knots after restricting the fine field with (1/4, 1/2, 1/4)
/// weights (1D). Rates are log2 ratios of consecutive differences.
ConvergenceReport self_convergence_study(
    const std::function<Trajectory(double)>& run_at_h,
    const std::vector<double>& hs, double K);

/// (1/4, 1/2, 1/4) restriction of a field on spacing h/2 to the h-grid.
Field restrict_halved(const Field& fine, const UniformGrid& coarse);

/// One-phase Stefan setup: fractional measure of order alpha discretized by
/// the midpoint rule with r = h, pure implicit stepping,
/// phi(z) = max(0, z - 1/2), u0 = exp(-1/(4-x^2)) 1_{(-2,2)}, f = 0.
Trajectory stefan_experiment(double alpha, double h, double dt, double T,
                             double box_half);

/// Linear benchmark: phi = identity, local Laplacian, u0 = exp(-x^2); the
/// exact solution is (1+4t)^{-1/2} exp(-x^2/(1+4t)). Errors are max-over-
/// knots discrete L1 distances to the exact solution; dt = h^dt_exponent.
ConvergenceReport heat_kernel_check(const std::vector<double>& hs,
                                    double dt_exponent, double T,
                                    double box_half = 6.0);

EquicontinuityEstimate measure_equicontinuity(const Trajectory& traj,
                                              const Field& u0,
                                              const SpaceTimeFn& f);

/// Deterministic random field supported on [-support_half, support_half].
Field random_compact_field(const UniformGrid& grid, std::mt19937_64& rng,
                           double amplitude, double support_half);

/// Least-squares slope of log(err) against log(h) over the finest n levels.
double observed_order(const std::vector<double>& hs,
                      const std::vector<double>& errors, int n = 4);

// CSV writers; each emits a '#'-prefixed provenance line then a header row.
void write_lte_csv(std::ostream& out, const std::vector<LteReport>& reports,
                   const std::string& provenance);
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report,
                           const std::string& provenance);
void write_property_csv(std::ostream& out, const PropertyReport& report,
                        const std::string& provenance);

}  // namespace nlpme
