#include "nlpme/elliptic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlpme {

std::pair<Field, SolveReport> fixed_point_solve(
    const DiscreteOperator& op, const std::function<double(double)>& phi,
    const Field& rho, double tol, const Field* warm_start) {
  if (tol <= 0.0) throw std::invalid_argument("fixed_point_solve: tol > 0");
  if (rho.grid.dim != op.dim())
    throw std::invalid_argument("fixed_point_solve: grid/operator mismatch");
  const double m = op.total_mass();
  const double inv_tol = 1e-14;
  SolveReport report;
  Field w = warm_start ? *warm_start : rho;
  if (warm_start && !(warm_start->grid == rho.grid))
    throw std::invalid_argument("fixed_point_solve: warm start grid mismatch");
  Field g(w.grid);
  const int max_iter = 100000;
  for (int k = 0; k < max_iter; ++k) {
    for (size_t i = 0; i < g.values.size(); ++i)
      g.values[i] = phi(w.values[i]);
    const Field Lg = apply(op, g);
    // residual of the original equation: L[phi(w)] + rho - w
    double res = 0.0;
    for (size_t i = 0; i < g.values.size(); ++i)
      res += std::abs(Lg.values[i] + rho.values[i] - w.values[i]);
    res *= w.grid.cell_volume();
    if (!report.residual_history.empty()) {
      const double prev = report.residual_history.back();
      // ratios are only meaningful above the tolerance noise floor
      if (prev > 100.0 * tol && res > 0.0)
        report.contraction_estimate =
            std::max(report.contraction_estimate, res / prev);
    }
    report.residual_history.push_back(res);
    if (res <= tol) {
      report.iterations = k;
      return {w, report};
    }
    for (size_t i = 0; i < g.values.size(); ++i) {
      const double y = Lg.values[i] + m * g.values[i] + rho.values[i];
      w.values[i] = phi_inverse_shifted(phi, m, y, inv_tol, w.values[i]);
    }
  }
  throw std::runtime_error("fixed_point_solve: no convergence within budget");
}

std::vector<double> default_delta_schedule(double h) {
  std::vector<double> schedule;
  double delta = std::max(h, 1e-3);
  for (int k = 0; k < 20; ++k) {
    schedule.push_back(delta);
    delta *= 0.5;
  }
  return schedule;
}

std::pair<Field, SolveReport> solve_implicit(
    const DiscreteOperator& op, const Nonlinearity& phi, const Field& rho,
    double tol, const std::vector<double>& delta_schedule) {
  if (delta_schedule.empty())
    throw std::invalid_argument("solve_implicit: empty delta schedule");
  // intrinsically strictly increasing Lipschitz-on-range kinds need no
  // regularization; solve the raw problem (delta_used stays 0)
  if (phi.kind == Nonlinearity::Kind::kIdentity ||
      (phi.kind == Nonlinearity::Kind::kPower && phi.m >= 1.0)) {
    return fixed_point_solve(
        op, [phi](double z) { return phi(z); }, rho, tol);
  }
  SolveReport report;
  Field w;
  bool have_prev = false;
  for (double delta : delta_schedule) {
    const RegularizedNonlinearity reg = regularize(phi, delta);
    auto [sol, rep] = fixed_point_solve(
        op, [reg](double z) { return reg(z); }, rho, tol,
        have_prev ? &w : nullptr);
    report.iterations += rep.iterations;
    report.residual_history.insert(report.residual_history.end(),
                                   rep.residual_history.begin(),
                                   rep.residual_history.end());
    report.contraction_estimate =
        std::max(report.contraction_estimate, rep.contraction_estimate);
    report.delta_used = delta;
    if (have_prev && l1_norm(sol - w) <= 10.0 * tol) {
      w = sol;
      return {w, report};
    }
    w = sol;
    have_prev = true;
  }
  return {w, report};
}

namespace {

// partial-pivot LU solve of the dense n x n system in place
void lu_solve(std::vector<double>& A, std::vector<double>& b, int n) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(A[col * n + col]);
    for (int row = col + 1; row < n; ++row) {
      const double v = std::abs(A[row * n + col]);
      if (v > best) {
        best = v;
        piv = row;
      }
    }
    if (best == 0.0) throw std::runtime_error("oracle: singular Jacobian");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(A[col * n + j], A[piv * n + j]);
      std::swap(b[col], b[piv]);
    }
    for (int row = col + 1; row < n; ++row) {
      const double f = A[row * n + col] / A[col * n + col];
      if (f == 0.0) continue;
      A[row * n + col] = 0.0;
      for (int j = col + 1; j < n; ++j) A[row * n + j] -= f * A[col * n + j];
      b[row] -= f * b[col];
    }
  }
  for (int row = n - 1; row >= 0; --row) {
    double s = b[row];
    for (int j = row + 1; j < n; ++j) s -= A[row * n + j] * b[j];
    b[row] = s / A[row * n + row];
  }
}

}  // namespace

Field dense_oracle_solve(const DiscreteOperator& op,
                         const std::function<double(double)>& phi,
                         const Field& rho) {
  const UniformGrid& g = rho.grid;
  const std::int64_t n64 = g.size();
  if (n64 > 4096)
    throw std::invalid_argument("dense_oracle_solve: grid too large");
  const int n = int(n64);
  // operator matrix: L[psi]_i = sum_j A_ij psi_j with A_ii = -total_mass
  std::vector<double> A(size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    const MultiIndex idx = g.unflatten(i);
    A[size_t(i) * n + i] = -op.total_mass();
    for (const auto& e : op.entries()) {
      MultiIndex sh = idx;
      for (int d = 0; d < g.dim; ++d) sh[d] += e.offset[d];
      if (g.in_range(sh)) A[size_t(i) * n + g.flatten(sh)] += e.weight;
    }
  }
  auto residual = [&](const std::vector<double>& w, std::vector<double>& F) {
    std::vector<double> pw(n);
    for (int i = 0; i < n; ++i) pw[i] = phi(w[i]);
    for (int i = 0; i < n; ++i) {
      double lp = 0.0;
      for (int j = 0; j < n; ++j) lp += A[size_t(i) * n + j] * pw[j];
      F[i] = w[i] - lp - rho.values[i];
    }
  };
  auto norm1 = [&](const std::vector<double>& F) {
    double s = 0.0;
    for (double v : F) s += std::abs(v);
    return s;
  };
  std::vector<double> w(rho.values.begin(), rho.values.end());
  std::vector<double> F(n), Fn(n);
  residual(w, F);
  const double stop = 1e-13 * (1.0 + norm1(F));
  for (int it = 0; it < 200; ++it) {
    if (norm1(F) <= stop) break;
    // J = I - A diag(phi'(w)), phi' by central differences
    std::vector<double> J(size_t(n) * n, 0.0);
    for (int j = 0; j < n; ++j) {
      const double e = 1e-7 * (1.0 + std::abs(w[j]));
      const double dphi = (phi(w[j] + e) - phi(w[j] - e)) / (2.0 * e);
      for (int i = 0; i < n; ++i)
        J[size_t(i) * n + j] = -A[size_t(i) * n + j] * dphi;
      J[size_t(j) * n + j] += 1.0;
    }
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = -F[i];
    lu_solve(J, d, n);
    double lambda = 1.0;
    const double base = norm1(F);
    std::vector<double> trial(n);
    while (true) {
      for (int i = 0; i < n; ++i) trial[i] = w[i] + lambda * d[i];
      residual(trial, Fn);
      if (norm1(Fn) < base || lambda < 1e-8) break;
      lambda *= 0.5;
    }
    w.swap(trial);
    F.swap(Fn);
  }
  Field out(g);
  out.values.assign(w.begin(), w.end());
  return out;
}

}  // namespace nlpme
