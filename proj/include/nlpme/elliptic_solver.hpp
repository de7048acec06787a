#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "nlpme/discrete_operator.hpp"
#include "nlpme/grid.hpp"
#include "nlpme/nonlinearity.hpp"

namespace nlpme {

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;  // discrete L1 residuals per sweep
  double contraction_estimate = 0.0;     // max ratio of consecutive residuals
  double delta_used = 0.0;               // final regularization level
};

/// Solves w - L[phi(w)] = rho on the grid (zero exterior) by the
/// L1-contracting fixed point
///   W_{k+1} = sum_beta w_beta phi(w_k(. + z_beta)) + rho,
///   w_{k+1} = Phi^{-1}(W_{k+1}),  Phi(w) = w + total_mass * phi(w),
/// which contracts with factor at most 1 - 1/(1 + total_mass * c) when phi
/// has slope bound c. phi must be monotone with phi(0) = 0 (strictness of
/// Phi, not phi, is what the inversion needs). Stops when the L1 residual
/// drops below tol; throws if it fails to converge.
std::pair<Field, SolveReport> fixed_point_solve(
    const DiscreteOperator& op, const std::function<double(double)>& phi,
    const Field& rho, double tol, const Field* warm_start = nullptr);

/// Outer regularization loop for merely continuous monotone phi: solves the
/// phi_delta problem along the (decreasing) delta schedule, warm-starting
/// each level from the previous solution, and stops when consecutive
/// solutions are L1-Cauchy within 10*tol (or the schedule is exhausted).
/// Reports the final delta in delta_used.
std::pair<Field, SolveReport> solve_implicit(
    const DiscreteOperator& op, const Nonlinearity& phi, const Field& rho,
    double tol, const std::vector<double>& delta_schedule);

/// delta_0 = max(h, 1e-3) halved 20 times.
std::vector<double> default_delta_schedule(double h);

/// Dense damped-Newton reference solver for the same problem; meant for
/// small grids (assembles the full matrix, O(n^3) LU per iteration).
Field dense_oracle_solve(const DiscreteOperator& op,
                         const std::function<double(double)>& phi,
                         const Field& rho);

}  // namespace nlpme
