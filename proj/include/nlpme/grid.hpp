#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlpme/levy_measure.hpp"  // Coord, kMaxDim

namespace nlpme {

using MultiIndex = std::array<int, kMaxDim>;  // unused dims are zero

/// Cell-centered uniform grid on the box [-R, R]^N: centers x_beta = h*beta
/// with |beta_i| <= n, R = (n + 1/2) h, so the cells tile the box exactly.
struct UniformGrid {
  int dim = 1;
  double h = 1.0;
  int n = 0;  // index range per axis: -n..n

  UniformGrid() = default;
  UniformGrid(int dim_, double h_, double half_extent);

  int points_per_axis() const { return 2 * n + 1; }
  std::int64_t size() const;
  double half_extent() const { return (n + 0.5) * h; }
  double cell_volume() const;

  /// Row-major linear index; indices must be in range.
  std::int64_t flatten(const MultiIndex& idx) const;
  MultiIndex unflatten(std::int64_t flat) const;
  bool in_range(const MultiIndex& idx) const;
  Coord center(const MultiIndex& idx) const;

  bool operator==(const UniformGrid& o) const {
    return dim == o.dim && h == o.h && n == o.n;
  }
};

/// Grid function with implicit zero extension outside the box.
struct Field {
  UniformGrid grid;
  std::vector<double> values;  // row-major over the index box

  Field() = default;
  explicit Field(const UniformGrid& g);

  double& at(const MultiIndex& idx) { return values[grid.flatten(idx)]; }
  double at(const MultiIndex& idx) const { return values[grid.flatten(idx)]; }
  /// Zero-extended read.
  double read(const MultiIndex& idx) const {
    return grid.in_range(idx) ? values[grid.flatten(idx)] : 0.0;
  }
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field scaled(const Field& a, double c);

struct TimeGrid {
  std::vector<double> knots;  // 0 = t_0 < ... < t_J = T

  static TimeGrid uniform(double T, int steps);
  explicit TimeGrid(std::vector<double> knots_in);
  TimeGrid() = default;

  int steps() const { return int(knots.size()) - 1; }
  double dt(int j) const { return knots[j] - knots[j - 1]; }  // j in 1..J
  double max_dt() const;
  double final_time() const { return knots.back(); }
};

using SpaceFn = std::function<double(const Coord&)>;
using SpaceTimeFn = std::function<double(const Coord&, double)>;

/// Per-cell averages of an integrable function, by tensor Gauss quadrature
/// (exact for low-degree polynomials, ~1e-10 for smooth data).
Field cell_average(const SpaceFn& func, const UniformGrid& grid);

/// Point samples at cell centers (the piecewise-constant view of Prop-style
/// equivalence tests; cheaper than averaging).
Field sample(const SpaceFn& func, const UniformGrid& grid);

/// Discrete L1 norm h^N sum |.|, optionally restricted to the sub-box
/// [-K, K]^N (K <= box half extent).
double l1_norm(const Field& field);
double l1_norm(const Field& field, double K);
double linf_norm(const Field& field);
/// h^N sum of values (signed mass).
double mass(const Field& field);
/// h^N sum of positive parts.
double positive_part_l1(const Field& field);

/// Discrete translation modulus
///   lambda(shifts) = max over the given lattice shifts of
///     ||u0 - u0(.+xi)||_l1 + ||f - f(.+xi,.)||_L1(Q_T)
/// with f sampled on the trajectory's space-time grid (may be null).
double translation_modulus(const Field& u0, const SpaceTimeFn& f,
                           const TimeGrid& tg,
                           const std::vector<MultiIndex>& shifts);

struct Trajectory;  // defined in time_stepper.hpp

/// Piecewise linear interpolation in time between bracketing knots.
Field time_interpolant(const Trajectory& traj, double t);

/// max over knots of sum_{cells in K} int_cell |U - u(x, t_j)| dx.
double triple_norm(const Trajectory& traj, const SpaceTimeFn& reference,
                   double K);

/// Snapshot text format: '#' header lines (dim, h, R, t), then one line per
/// cell "i1 ... iN value" in row-major order, 17 significant digits.
void write_snapshot(std::ostream& out, const Field& field, double t);
void write_snapshot_file(const std::string& path, const Field& field,
                         double t);
Field read_snapshot(std::istream& in, double* t_out = nullptr);

}  // namespace nlpme
