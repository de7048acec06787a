#include "nlpme/time_stepper.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "nlpme/quadrature.hpp"

namespace nlpme {

double cfl_bound(const Nonlinearity& phi2, double nu2_mass, double M) {
  if (nu2_mass < 0.0) throw std::invalid_argument("cfl_bound: nu2_mass >= 0");
  if (nu2_mass == 0.0) return std::numeric_limits<double>::infinity();
  const std::optional<double> L = lipschitz_bound(phi2, M);
  if (!L)
    throw std::runtime_error(
        "cfl_bound: phi2 has no Lipschitz bound on the solution range; the "
        "explicit part is inadmissible without regularization");
  if (*L == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (*L * nu2_mass);
}

Field explicit_step(const DiscreteOperator& op2_scaled,
                    const std::function<double(double)>& phi2,
                    const Field& U) {
  if (op2_scaled.entries().empty()) return U;
  Field g(U.grid);
  for (size_t i = 0; i < g.values.size(); ++i) g.values[i] = phi2(U.values[i]);
  const Field Lg = apply(op2_scaled, g);
  Field out(U.grid);
  for (size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = U.values[i] + Lg.values[i];
  return out;
}

Field source_slab_average(const SpaceTimeFn& f, double t_prev, double t_cur,
                          const UniformGrid& grid) {
  if (!(t_prev < t_cur))
    throw std::invalid_argument("source_slab_average: t_prev < t_cur");
  if (!f) return Field(grid);
  const double dt = t_cur - t_prev;
  return cell_average(
      [&](const Coord& x) {
        return gauss_legendre([&](double t) { return f(x, t); }, t_prev, t_cur,
                              16) /
               dt;
      },
      grid);
}

std::pair<Field, SolveReport> advance(const Field& U_prev,
                                      const SchemeConfig& config, int j) {
  if (j < 1 || j > config.times.steps())
    throw std::invalid_argument("advance: step index out of range");
  const double dt = config.times.dt(j);
  Field rho = explicit_step(config.op2.scaled(dt), config.phi2, U_prev);
  if (config.source) {
    const Field F = source_slab_average(config.source, config.times.knots[j - 1],
                                        config.times.knots[j], U_prev.grid);
    for (size_t i = 0; i < rho.values.size(); ++i)
      rho.values[i] += dt * F.values[i];
  }
  if (config.op1.entries().empty()) return {rho, SolveReport{}};
  const std::vector<double> schedule =
      config.delta_schedule.empty() ? default_delta_schedule(U_prev.grid.h)
                                    : config.delta_schedule;
  return solve_implicit(config.op1.scaled(dt), config.phi1, rho, config.tol,
                        schedule);
}

Trajectory run(const SchemeConfig& config, const Field& u0) {
  if (config.op1.dim() != u0.grid.dim || config.op2.dim() != u0.grid.dim)
    throw std::invalid_argument("run: operator/grid dimension mismatch");
  if (config.op2.total_mass() > 0.0 && config.cfl != CflPolicy::kOff) {
    // a priori range bound M = ||u0||_inf + int_0^T ||f||_inf dt, with the
    // source part estimated from the slab averages
    double M = linf_norm(u0);
    if (config.source) {
      for (int j = 1; j <= config.times.steps(); ++j) {
        const Field F =
            source_slab_average(config.source, config.times.knots[j - 1],
                                config.times.knots[j], u0.grid);
        M += config.times.dt(j) * linf_norm(F);
      }
    }
    const double bound = cfl_bound(config.phi2, config.op2.total_mass(), M);
    if (config.times.max_dt() > bound) {
      if (config.cfl == CflPolicy::kEnforce)
        throw std::runtime_error(
            "run: CFL violation (max dt " +
            std::to_string(config.times.max_dt()) + " > bound " +
            std::to_string(bound) + "); refusing to step");
      std::cerr << "warning: CFL violated (max dt " << config.times.max_dt()
                << " > bound " << bound << "); stepping anyway\n";
    }
  }
  Trajectory traj;
  traj.times = config.times;
  traj.fields.push_back(u0);
  traj.mass_ledger.push_back(mass(u0));
  for (int j = 1; j <= config.times.steps(); ++j) {
    auto [next, report] = advance(traj.fields.back(), config, j);
    traj.fields.push_back(std::move(next));
    traj.reports.push_back(std::move(report));
    traj.mass_ledger.push_back(mass(traj.fields.back()));
  }
  return traj;
}

}  // namespace nlpme
