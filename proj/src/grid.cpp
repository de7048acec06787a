#include "nlpme/grid.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nlpme/quadrature.hpp"
#include "nlpme/time_stepper.hpp"

namespace nlpme {

UniformGrid::UniformGrid(int dim_, double h_, double half_extent)
    : dim(dim_), h(h_) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("grid: bad dim");
  if (h <= 0.0) throw std::invalid_argument("grid: h must be positive");
  if (half_extent < 0.5 * h)
    throw std::invalid_argument("grid: box smaller than one cell");
  n = int(std::lround(half_extent / h - 0.5));
}

std::int64_t UniformGrid::size() const {
  std::int64_t s = 1;
  for (int i = 0; i < dim; ++i) s *= points_per_axis();
  return s;
}

double UniformGrid::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= h;
  return v;
}

std::int64_t UniformGrid::flatten(const MultiIndex& idx) const {
  std::int64_t f = 0;
  for (int i = 0; i < dim; ++i) f = f * points_per_axis() + (idx[i] + n);
  return f;
}

MultiIndex UniformGrid::unflatten(std::int64_t flat) const {
  MultiIndex idx{};
  for (int i = dim - 1; i >= 0; --i) {
    idx[i] = int(flat % points_per_axis()) - n;
    flat /= points_per_axis();
  }
  return idx;
}

bool UniformGrid::in_range(const MultiIndex& idx) const {
  for (int i = 0; i < dim; ++i)
    if (idx[i] < -n || idx[i] > n) return false;
  return true;
}

Coord UniformGrid::center(const MultiIndex& idx) const {
  Coord x{};
  for (int i = 0; i < dim; ++i) x[i] = h * idx[i];
  return x;
}

Field::Field(const UniformGrid& g) : grid(g), values(g.size(), 0.0) {}

namespace {
void check_same_grid(const Field& a, const Field& b) {
  if (!(a.grid == b.grid))
    throw std::invalid_argument("field arithmetic: grid mismatch");
}
}  // namespace

Field operator+(const Field& a, const Field& b) {
  check_same_grid(a, b);
  Field out(a.grid);
  for (size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = a.values[i] + b.values[i];
  return out;
}

Field operator-(const Field& a, const Field& b) {
  check_same_grid(a, b);
  Field out(a.grid);
  for (size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = a.values[i] - b.values[i];
  return out;
}

Field scaled(const Field& a, double c) {
  Field out = a;
  for (double& v : out.values) v *= c;
  return out;
}

TimeGrid::TimeGrid(std::vector<double> knots_in) : knots(std::move(knots_in)) {
  if (knots.size() < 2 || knots.front() != 0.0)
    throw std::invalid_argument("time grid: needs 0 = t_0 < ... < t_J");
  for (size_t j = 1; j < knots.size(); ++j)
    if (knots[j] <= knots[j - 1])
      throw std::invalid_argument("time grid: knots must increase strictly");
}

TimeGrid TimeGrid::uniform(double T, int steps) {
  if (T <= 0.0 || steps < 1)
    throw std::invalid_argument("time grid: T > 0 and steps >= 1 required");
  std::vector<double> k(steps + 1);
  for (int j = 0; j <= steps; ++j) k[j] = T * double(j) / steps;
  k.back() = T;
  return TimeGrid(std::move(k));
}

double TimeGrid::max_dt() const {
  double m = 0.0;
  for (int j = 1; j <= steps(); ++j) m = std::max(m, dt(j));
  return m;
}

namespace {

// 16-node tensor Gauss rule per cell: ~1e-10 accuracy for smooth data.
constexpr int kCellNodes = 16;

}  // namespace

Field cell_average(const SpaceFn& func, const UniformGrid& grid) {
  Field out(grid);
  const std::int64_t total = grid.size();
  for (std::int64_t f = 0; f < total; ++f) {
    const MultiIndex idx = grid.unflatten(f);
    const Coord c = grid.center(idx);
    // recursive tensor quadrature over the cell, normalized by volume
    std::function<double(int, Coord&)> rec = [&](int d, Coord& p) -> double {
      if (d == grid.dim) return func(p);
      double v = gauss_legendre(
          [&](double x) {
            p[d] = x;
            return rec(d + 1, p);
          },
          c[d] - 0.5 * grid.h, c[d] + 0.5 * grid.h, kCellNodes);
      return v / grid.h;
    };
    Coord p{};
    out.values[f] = rec(0, p);
  }
  return out;
}

Field sample(const SpaceFn& func, const UniformGrid& grid) {
  Field out(grid);
  const std::int64_t total = grid.size();
  for (std::int64_t f = 0; f < total; ++f)
    out.values[f] = func(grid.center(grid.unflatten(f)));
  return out;
}

double l1_norm(const Field& field) {
  double s = 0.0;
  for (double v : field.values) s += std::abs(v);
  return s * field.grid.cell_volume();
}

double l1_norm(const Field& field, double K) {
  const UniformGrid& g = field.grid;
  double s = 0.0;
  for (std::int64_t f = 0; f < g.size(); ++f) {
    const MultiIndex idx = g.unflatten(f);
    bool inside = true;
    for (int i = 0; i < g.dim; ++i)
      if (std::abs(g.h * idx[i]) > K) inside = false;
    if (inside) s += std::abs(field.values[f]);
  }
  return s * g.cell_volume();
}

double linf_norm(const Field& field) {
  double m = 0.0;
  for (double v : field.values) m = std::max(m, std::abs(v));
  return m;
}

double mass(const Field& field) {
  double s = 0.0;
  for (double v : field.values) s += v;
  return s * field.grid.cell_volume();
}

double positive_part_l1(const Field& field) {
  double s = 0.0;
  for (double v : field.values) s += std::max(v, 0.0);
  return s * field.grid.cell_volume();
}

double translation_modulus(const Field& u0, const SpaceTimeFn& f,
                           const TimeGrid& tg,
                           const std::vector<MultiIndex>& shifts) {
  const UniformGrid& g = u0.grid;
  double worst = 0.0;
  for (const MultiIndex& xi : shifts) {
    double du = 0.0;
    for (std::int64_t fl = 0; fl < g.size(); ++fl) {
      MultiIndex idx = g.unflatten(fl);
      MultiIndex sh = idx;
      for (int i = 0; i < g.dim; ++i) sh[i] += xi[i];
      du += std::abs(u0.values[fl] - u0.read(sh));
    }
    du *= g.cell_volume();
    double df = 0.0;
    if (f) {
      for (int j = 1; j <= tg.steps(); ++j) {
        const double t = tg.knots[j];
        double slab = 0.0;
        for (std::int64_t fl = 0; fl < g.size(); ++fl) {
          MultiIndex idx = g.unflatten(fl);
          Coord x = g.center(idx);
          Coord xs = x;
          for (int i = 0; i < g.dim; ++i) xs[i] += g.h * xi[i];
          slab += std::abs(f(x, t) - f(xs, t));
        }
        df += slab * g.cell_volume() * tg.dt(j);
      }
    }
    worst = std::max(worst, du + df);
  }
  return worst;
}

Field time_interpolant(const Trajectory& traj, double t) {
  const TimeGrid& tg = traj.times;
  if (t < tg.knots.front() - 1e-12 || t > tg.knots.back() + 1e-12)
    throw std::invalid_argument("time_interpolant: t outside [0,T]");
  t = std::min(std::max(t, tg.knots.front()), tg.knots.back());
  for (int j = 1; j <= tg.steps(); ++j) {
    if (t <= tg.knots[j]) {
      const double w = (t - tg.knots[j - 1]) / tg.dt(j);
      if (w <= 0.0) return traj.fields[j - 1];
      if (w >= 1.0) return traj.fields[j];
      Field out(traj.fields[j].grid);
      for (size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = (1.0 - w) * traj.fields[j - 1].values[i] +
                        w * traj.fields[j].values[i];
      return out;
    }
  }
  return traj.fields.back();
}

double triple_norm(const Trajectory& traj, const SpaceTimeFn& reference,
                   double K) {
  double worst = 0.0;
  for (size_t j = 0; j < traj.fields.size(); ++j) {
    const Field& U = traj.fields[j];
    const double t = traj.times.knots[j];
    const UniformGrid& g = U.grid;
    double acc = 0.0;
    for (std::int64_t f = 0; f < g.size(); ++f) {
      const MultiIndex idx = g.unflatten(f);
      const Coord c = g.center(idx);
      bool inside = true;
      for (int i = 0; i < g.dim; ++i)
        if (std::abs(c[i]) > K) inside = false;
      if (!inside) continue;
      const double u = U.values[f];
      std::function<double(int, Coord&)> rec = [&](int d, Coord& p) -> double {
        if (d == g.dim) return std::abs(u - reference(p, t));
        double v = gauss_legendre(
            [&](double x) {
              p[d] = x;
              return rec(d + 1, p);
            },
            c[d] - 0.5 * g.h, c[d] + 0.5 * g.h, kCellNodes);
        return v;
      };
      Coord p{};
      acc += rec(0, p);
    }
    worst = std::max(worst, acc);
  }
  return worst;
}

void write_snapshot(std::ostream& out, const Field& field, double t) {
  const UniformGrid& g = field.grid;
  out.precision(17);
  out << "# dim " << g.dim << "\n# h " << g.h << "\n# R " << g.half_extent()
      << "\n# t " << t << "\n";
  for (std::int64_t f = 0; f < g.size(); ++f) {
    const MultiIndex idx = g.unflatten(f);
    for (int i = 0; i < g.dim; ++i) out << idx[i] << ' ';
    out << field.values[f] << "\n";
  }
}

void write_snapshot_file(const std::string& path, const Field& field,
                         double t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open snapshot file: " + path);
  write_snapshot(out, field, t);
}

Field read_snapshot(std::istream& in, double* t_out) {
  int dim = -1;
  double h = 0.0, R = 0.0, t = 0.0;
  std::string line;
  std::vector<std::pair<MultiIndex, double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    if (line[0] == '#') {
      std::string hash, key;
      ss >> hash >> key;
      if (key == "dim") ss >> dim;
      else if (key == "h") ss >> h;
      else if (key == "R") ss >> R;
      else if (key == "t") ss >> t;
      continue;
    }
    if (dim < 1) throw std::runtime_error("snapshot: missing header");
    MultiIndex idx{};
    for (int i = 0; i < dim; ++i) ss >> idx[i];
    double v;
    ss >> v;
    if (!ss) throw std::runtime_error("snapshot: malformed row: " + line);
    rows.emplace_back(idx, v);
  }
  if (dim < 1 || h <= 0.0) throw std::runtime_error("snapshot: bad header");
  Field field{UniformGrid(dim, h, R)};
  field.values.assign(field.grid.size(), 0.0);
  for (auto& [idx, v] : rows) field.at(idx) = v;
  if (t_out) *t_out = t;
  return field;
}

}  // namespace nlpme
