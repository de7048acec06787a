#pragma once

#include <utility>
#include <vector>

#include "nlpme/discrete_operator.hpp"
#include "nlpme/elliptic_solver.hpp"
#include "nlpme/grid.hpp"
#include "nlpme/nonlinearity.hpp"

namespace nlpme {

enum class CflPolicy { kEnforce, kWarn, kOff };

/// One full step is U^j = T_imp[T_exp[U^{j-1}] + dt_j F^j] with
///   T_exp[psi] = psi + L^{dt nu2}[phi2(psi)],
///   T_imp solving w - L^{dt nu1}[phi1(w)] = rho.
/// The operators are stored unscaled; advance() scales their weights by dt_j,
/// so one operator serves nonuniform time grids.
struct SchemeConfig {
  DiscreteOperator op1;  // implicit part
  Nonlinearity phi1;
  DiscreteOperator op2;  // explicit part (zero operator for pure implicit)
  Nonlinearity phi2;
  TimeGrid times;
  SpaceTimeFn source;  // null for f == 0
  double tol = 1e-10;  // elliptic L1 residual tolerance
  CflPolicy cfl = CflPolicy::kEnforce;
  // implicit regularization schedule; empty means default_delta_schedule(h)
  std::vector<double> delta_schedule;
};

struct Trajectory {
  std::vector<Field> fields;  // U^0 .. U^J, aligned with times
  TimeGrid times;
  std::vector<SolveReport> reports;  // one per step
  std::vector<double> mass_ledger;   // h^N sum U^j per knot
};

/// Max admissible dt from dt * L_{phi2} * nu2_mass <= 1, with
/// L = lipschitz_bound(phi2, M). Infinity when the explicit part vanishes;
/// throws when the bound is unbounded and nu2_mass > 0 (CFL-impossible).
double cfl_bound(const Nonlinearity& phi2, double nu2_mass, double M);

/// T_exp for an already dt-scaled operator.
Field explicit_step(const DiscreteOperator& op2_scaled,
                    const std::function<double(double)>& phi2, const Field& U);

/// F^j: per-cell average of (1/(t_cur - t_prev)) int f dt over the slab,
/// tensor Gauss in space and time.
Field source_slab_average(const SpaceTimeFn& f, double t_prev, double t_cur,
                          const UniformGrid& grid);

/// One step j (1-based) of the scheme. No CFL checking here; run() guards.
std::pair<Field, SolveReport> advance(const Field& U_prev,
                                      const SchemeConfig& config, int j);

/// Full trajectory from the initial field. Under the enforce policy a CFL
/// violation is refused before any stepping; warn prints to stderr and
/// proceeds; off proceeds silently.
Trajectory run(const SchemeConfig& config, const Field& u0);

}  // namespace nlpme
