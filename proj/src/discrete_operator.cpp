#include "nlpme/discrete_operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "nlpme/quadrature.hpp"
#include "nlpme/special_functions.hpp"

namespace nlpme {

namespace {

double offset_norm(const MultiIndex& beta, double h, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += double(beta[i]) * beta[i];
  return h * std::sqrt(s);
}

bool is_zero_offset(const MultiIndex& beta, int dim) {
  for (int i = 0; i < dim; ++i)
    if (beta[i] != 0) return false;
  return true;
}

MultiIndex negate(const MultiIndex& beta, int dim) {
  MultiIndex m{};
  for (int i = 0; i < dim; ++i) m[i] = -beta[i];
  return m;
}

}  // namespace

DiscreteOperator::DiscreteOperator(int dim, double h) : dim_(dim), h_(h) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("operator: bad dimension");
  if (h <= 0.0) throw std::invalid_argument("operator: h must be positive");
}

void DiscreteOperator::add_entry(const MultiIndex& beta, double weight) {
  if (is_zero_offset(beta, dim_))
    throw std::invalid_argument("operator: zero offset not allowed");
  if (weight < 0.0)
    throw std::invalid_argument("operator: negative weight");
  if (weight == 0.0) return;
  for (Entry& e : entries_) {
    if (e.offset == beta) {
      e.weight += weight;
      total_mass_ += weight;
      return;
    }
  }
  entries_.push_back({beta, weight});
  total_mass_ += weight;
}

void DiscreteOperator::add_symmetric_pair(const MultiIndex& beta,
                                          double weight) {
  add_entry(beta, weight);
  add_entry(negate(beta, dim_), weight);
}

double DiscreteOperator::weight_at(const MultiIndex& beta) const {
  for (const Entry& e : entries_)
    if (e.offset == beta) return e.weight;
  return 0.0;
}

void DiscreteOperator::validate() const {
  for (const Entry& e : entries_) {
    if (!(e.weight >= 0.0))
      throw std::runtime_error("operator: negative or NaN weight");
    const double mirror = weight_at(negate(e.offset, dim_));
    if (std::abs(mirror - e.weight) > 1e-12 * (1.0 + std::abs(e.weight)))
      throw std::runtime_error("operator: stencil is not symmetric");
  }
}

double DiscreteOperator::levy_functional() const {
  double s = 0.0;
  for (const Entry& e : entries_) {
    const double z = offset_norm(e.offset, h_, dim_);
    s += std::min(z * z, 1.0) * e.weight;
  }
  return s;
}

DiscreteOperator DiscreteOperator::scaled(double factor) const {
  if (factor < 0.0)
    throw std::invalid_argument("operator: negative scale factor");
  DiscreteOperator out(dim_, h_);
  out.entries_ = entries_;
  for (Entry& e : out.entries_) e.weight *= factor;
  out.total_mass_ = total_mass_ * factor;
  out.tail_mass_ = tail_mass_ * factor;
  out.provenance_ = provenance_;
  return out;
}

DiscreteOperator add(const DiscreteOperator& a, const DiscreteOperator& b) {
  if (a.dim_ != b.dim_ || a.h_ != b.h_)
    throw std::invalid_argument("operator add: grid mismatch");
  DiscreteOperator out = a;
  for (const DiscreteOperator::Entry& e : b.entries_)
    out.add_entry(e.offset, e.weight);
  out.tail_mass_ = a.tail_mass_ + b.tail_mass_;
  out.provenance_ = a.provenance_ + "+" + b.provenance_;
  return out;
}

Field apply(const DiscreteOperator& op, const Field& field) {
  if (field.grid.dim != op.dim() ||
      std::abs(field.grid.h - op.h()) > 1e-14 * op.h())
    throw std::invalid_argument("apply: operator/field grid mismatch");
  const UniformGrid& g = field.grid;
  Field out(g);
  const auto& entries = op.entries();
  for (std::int64_t f = 0; f < g.size(); ++f) {
    const MultiIndex idx = g.unflatten(f);
    const double here = field.values[f];
    double acc = 0.0;
    for (const auto& e : entries) {
      MultiIndex sh = idx;
      for (int i = 0; i < g.dim; ++i) sh[i] += e.offset[i];
      acc += (field.read(sh) - here) * e.weight;
    }
    out.values[f] = acc;
  }
  return out;
}

double apply_at(const DiscreteOperator& op, const SpaceFn& psi, const Coord& x,
                bool kill_tail) {
  const double here = psi(x);
  double acc = 0.0;
  for (const auto& e : op.entries()) {
    Coord y = x;
    for (int i = 0; i < op.dim(); ++i) y[i] += op.h() * e.offset[i];
    acc += (psi(y) - here) * e.weight;
  }
  if (kill_tail) acc -= here * op.tail_mass();
  return acc;
}

// ---- builders -------------------------------------------------------------

DiscreteOperator zero_operator(int dim, double h) {
  DiscreteOperator op(dim, h);
  op.set_provenance("zero");
  return op;
}

DiscreteOperator vanishing_viscosity_operator(const LevyMeasureSpec& spec,
                                              double r, double h, int dim) {
  DiscreteOperator op(dim, h);
  const double coeff =
      small_ball_second_moment(spec, r) / (2.0 * dim) / (h * h);
  for (int i = 0; i < dim; ++i) {
    MultiIndex beta{};
    beta[i] = 1;
    op.add_symmetric_pair(beta, coeff);
  }
  op.set_provenance("vanishing_viscosity");
  return op;
}

DiscreteOperator midpoint_operator(const LevyMeasureSpec& spec, double r,
                                   double h, int dim, double R_tail) {
  if (r < 0.0 || R_tail <= 0.0)
    throw std::invalid_argument("midpoint: need r >= 0 and R_tail > 0");
  if (R_tail < r)
    throw std::invalid_argument("midpoint: truncation R_tail must cover r");
  DiscreteOperator op(dim, h);
  const int M = int(std::ceil(R_tail / h + 1e-12));
  MultiIndex beta{};
  std::function<void(int)> rec = [&](int d) {
    if (d == dim) {
      if (is_zero_offset(beta, dim)) return;
      if (offset_norm(beta, h, dim) > R_tail + 1e-12 * h) return;
      const Coord c = [&] {
        Coord x{};
        for (int i = 0; i < dim; ++i) x[i] = h * beta[i];
        return x;
      }();
      const double w = cell_mass(spec, c, 0.5 * h, r);
      if (w > 0.0) op.add_entry(beta, w);
      return;
    }
    for (int b = -M; b <= M; ++b) {
      beta[d] = b;
      rec(d + 1);
    }
  };
  rec(0);
  // The covered cells partition their union, so the truncated remainder of
  // mu({|z| > r}) is exact up to the quadrature tolerance. The origin cell's
  // sliver outside {|z| > r} belongs to the near field, not the far tail.
  Coord origin{};
  const double m0 = (r > 0.0) ? cell_mass(spec, origin, 0.5 * h, r) : 0.0;
  op.set_tail_mass(
      std::max(0.0, tail_mass(spec, std::max(r, 1e-300)) - op.total_mass() - m0));
  op.set_provenance("midpoint");
  if (spec.is_zero()) op.set_tail_mass(0.0);
  return op;
}

namespace {

double hat(double t) { return std::max(0.0, 1.0 - std::abs(t)); }

/// Integral over the box prod_i [lo_i, hi_i] of wfn(z) * density(z)
/// restricted to {|z| > r}; axes are split at `peaks` (kinks of wfn), the
/// innermost axis additionally at the sphere crossing.
double weighted_box_integral(const LevyMeasureSpec& spec, const Coord& lo,
                             const Coord& hi, const Coord& peaks, double r,
                             const std::function<double(const Coord&)>& wfn,
                             int level, Coord& point, double tol) {
  const int dim = spec.dim;
  if (level == dim - 1) {
    double rest = 0.0;
    for (int i = 0; i < dim - 1; ++i) rest += point[i] * point[i];
    auto f = [&](double t) {
      point[level] = t;
      return wfn(point) * spec.density(point);
    };
    const double a = lo[level], b = hi[level];
    std::vector<double> cuts = {a, b};
    const double gap2 = r * r - rest;
    const double s0 = gap2 > 0.0 ? std::sqrt(gap2) : -1.0;
    for (double c : {peaks[level], s0, -s0})
      if (c > a && c < b) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double p = cuts[k], q = cuts[k + 1];
      if (q - p < 1e-300) continue;
      const double mm = 0.5 * (p + q);
      if (rest + mm * mm <= r * r) continue;  // inside the cutoff ball
      sum += adaptive_simpson(f, p, q, tol);
    }
    return sum;
  }
  auto f = [&](double t) {
    point[level] = t;
    return weighted_box_integral(spec, lo, hi, peaks, r, wfn, level + 1, point,
                                 tol * 0.25);
  };
  const double a = lo[level], b = hi[level], m = peaks[level];
  if (m > a && m < b)
    return adaptive_simpson(f, a, m, tol) + adaptive_simpson(f, m, b, tol);
  return adaptive_simpson(f, a, b, tol);
}

double hat_weight(const LevyMeasureSpec& spec, const MultiIndex& beta,
                  double h, double r) {
  const int dim = spec.dim;
  Coord lo{}, hi{}, peaks{};
  double near2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    peaks[i] = h * beta[i];
    lo[i] = peaks[i] - h;
    hi[i] = peaks[i] + h;
    const double nd = (lo[i] > 0.0) ? lo[i] : (hi[i] < 0.0 ? -hi[i] : 0.0);
    near2 += nd * nd;
  }
  if (near2 == 0.0 && r == 0.0)
    throw std::domain_error(
        "multilinear: support touches the singularity and the cutoff does not "
        "exclude it");
  auto wfn = [&](const Coord& z) {
    double w = 1.0;
    for (int i = 0; i < dim; ++i) w *= hat((z[i] - peaks[i]) / h);
    return w;
  };
  Coord point{};
  return weighted_box_integral(spec, lo, hi, peaks, r, wfn, 0, point, 1e-13);
}

}  // namespace

DiscreteOperator multilinear_operator(const LevyMeasureSpec& spec, double r,
                                      double h, int dim, double R_tail) {
  if (r < 0.0 || R_tail <= 0.0)
    throw std::invalid_argument("multilinear: need r >= 0 and R_tail > 0");
  if (R_tail < r)
    throw std::invalid_argument("multilinear: truncation R_tail must cover r");
  DiscreteOperator op(dim, h);
  const int M = int(std::ceil(R_tail / h + 1e-12));
  MultiIndex beta{};
  std::function<void(int)> rec = [&](int d) {
    if (d == dim) {
      if (is_zero_offset(beta, dim)) return;
      if (offset_norm(beta, h, dim) > R_tail + 1e-12 * h) return;
      const double w = hat_weight(spec, beta, h, r);
      if (w > 0.0) op.add_entry(beta, w);
      return;
    }
    for (int b = -M; b <= M; ++b) {
      beta[d] = b;
      rec(d + 1);
    }
  };
  rec(0);
  // Hats form a partition of unity, so sum over *all* beta (including 0) of
  // the weights equals mu({|z| > r}); the remainder past the truncation is
  // that total minus the included weights minus the beta = 0 hat mass.
  double w0 = 0.0;
  if (!spec.is_zero() && r < h * std::sqrt(double(dim))) {
    MultiIndex zero{};
    w0 = hat_weight(spec, zero, h, r);
  }
  op.set_tail_mass(spec.is_zero()
                       ? 0.0
                       : std::max(0.0, tail_mass(spec, std::max(r, 1e-300)) -
                                           op.total_mass() - w0));
  op.set_provenance("multilinear");
  return op;
}

DiscreteOperator lagrange_operator(const LevyMeasureSpec& spec, int order,
                                   double r, double h, int dim,
                                   double R_tail) {
  if (order < 1 || order > 7)
    throw std::invalid_argument(
        "lagrange: order must be in 1..7 (weights lose positivity beyond)");
  if (dim != 1)
    throw std::invalid_argument("lagrange: only the 1D builder is provided");
  if (r <= 0.0 || R_tail <= r)
    throw std::invalid_argument("lagrange: need 0 < r < R_tail");
  const int k = order;
  // cardinal integrals c_i = int_0^k prod_{j != i} (t - j)/(i - j) dt,
  // evaluated exactly (Gauss, degree <= 7)
  std::vector<double> card(k + 1);
  for (int i = 0; i <= k; ++i) {
    card[i] = gauss_legendre(
        [&](double t) {
          double p = 1.0;
          for (int j = 0; j <= k; ++j)
            if (j != i) p *= (t - j) / double(i - j);
          return p;
        },
        0.0, double(k), 16);
    if (card[i] <= 0.0)
      throw std::runtime_error("lagrange: nonpositive cardinal weight");
  }
  const int m0 = int(std::ceil(r / h - 1e-12));
  const int M = int(std::floor(R_tail / h + 1e-12));
  const int panels = (M - m0) / k;
  if (panels < 1)
    throw std::invalid_argument("lagrange: range too small for one panel");
  const int m_end = m0 + panels * k;
  std::vector<double> node_w(m_end - m0 + 1, 0.0);
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i <= k; ++i) node_w[p * k + i] += h * card[i];
  DiscreteOperator op(dim, h);
  for (int m = m0; m <= m_end; ++m) {
    const double w = spec.density_radial(h * m) * node_w[m - m0];
    if (w > 0.0) {
      MultiIndex beta{};
      beta[0] = m;
      op.add_symmetric_pair(beta, w);
    }
  }
  op.set_tail_mass(spec.is_zero() ? 0.0 : tail_mass(spec, h * m_end));
  op.set_provenance("lagrange(" + std::to_string(k) + ")");
  return op;
}

// ---- fractional semigroup weights -----------------------------------------

double fractional_weight_1d(double alpha, int m) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("fractional weight: alpha must be in (0,2)");
  if (m == 0) throw std::invalid_argument("fractional weight: m != 0");
  const double s = 0.5 * alpha;
  const int j = std::abs(m);
  const double C = std::pow(4.0, s) * gamma_fn(s + 0.5) /
                   (std::sqrt(M_PI) * std::abs(gamma_fn(-s)));
  return C * std::exp(log_gamma(j - s) - log_gamma(j + 1.0 + s));
}

namespace {

// one-sided mass sum_{j > M} K_j via the telescoping identity
//   Gamma(j-s)/Gamma(j+1+s) = (a_j - a_{j+1}) / (2s),  a_j = G(j-s)/G(j+s)
double fractional_tail_1d(double alpha, int M) {
  const double s = 0.5 * alpha;
  const double C = std::pow(4.0, s) * gamma_fn(s + 0.5) /
                   (std::sqrt(M_PI) * std::abs(gamma_fn(-s)));
  return C * std::exp(log_gamma(M + 1.0 - s) - log_gamma(M + 1.0 + s)) /
         (2.0 * s);
}

}  // namespace

double fractional_weight_quadrature(double alpha, const MultiIndex& beta,
                                    int dim, double tol, int refine) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("fractional weight: alpha must be in (0,2)");
  if (is_zero_offset(beta, dim))
    throw std::invalid_argument("fractional weight: beta != 0");
  const double s = 0.5 * alpha;
  const double tol_eff = tol * std::pow(0.1, refine);
  auto product = [&](double t) {
    double p = 1.0;
    for (int i = 0; i < dim; ++i) p *= bessel_ive(std::abs(beta[i]), 2.0 * t);
    return p;
  };
  // K = (1/|Gamma(-s)|) int_0^inf prod_i e^{-2t} I_{|beta_i|}(2t) t^{-1-s} dt;
  // split at t = 1, map the far part by u = 1/t (the integrand decays only
  // polynomially, like t^{-1-s-N/2}).
  const double near =
      tanh_sinh([&](double t) { return product(t) * std::pow(t, -1.0 - s); },
                0.0, 1.0, tol_eff);
  const double far = tanh_sinh(
      [&](double u) { return product(1.0 / u) * std::pow(u, s - 1.0); }, 0.0,
      1.0, tol_eff);
  return (near + far) / std::abs(gamma_fn(-s));
}

namespace {

// sum over all beta != 0 of the (h = 1) semigroup weights: the Bessel products
// sum to 1 over the full lattice, leaving 1 - (e^{-2t} I_0(2t))^N.
double fractional_total_mass(double alpha, int dim, double tol) {
  const double s = 0.5 * alpha;
  auto defect = [&](double t) {
    return 1.0 - std::pow(bessel_ive(0, 2.0 * t), dim);
  };
  const double near =
      tanh_sinh([&](double t) { return defect(t) * std::pow(t, -1.0 - s); },
                0.0, 1.0, tol);
  const double far = tanh_sinh(
      [&](double u) { return defect(1.0 / u) * std::pow(u, s - 1.0); }, 0.0,
      1.0, tol);
  return (near + far) / std::abs(gamma_fn(-s));
}

}  // namespace

DiscreteOperator discrete_fractional_laplacian(double alpha, double h, int dim,
                                               double tol, double R_tail) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument(
        "fractional laplacian: alpha must be in (0,2)");
  if (R_tail <= 0.0)
    throw std::invalid_argument("fractional laplacian: R_tail > 0 required");
  DiscreteOperator op(dim, h);
  const double scale = std::pow(h, -alpha);
  const int M = int(std::floor(R_tail / h + 1e-12));
  if (M < 1)
    throw std::invalid_argument("fractional laplacian: R_tail < h");
  if (dim == 1) {
    for (int m = 1; m <= M; ++m) {
      MultiIndex beta{};
      beta[0] = m;
      op.add_symmetric_pair(beta, scale * fractional_weight_1d(alpha, m));
    }
    op.set_tail_mass(scale * 2.0 * fractional_tail_1d(alpha, M));
  } else {
    MultiIndex beta{};
    std::function<void(int)> rec = [&](int d) {
      if (d == dim) {
        if (is_zero_offset(beta, dim)) return;
        double n2 = 0.0;
        for (int i = 0; i < dim; ++i) n2 += double(beta[i]) * beta[i];
        if (n2 > double(M) * M + 1e-9) return;
        op.add_entry(beta,
                     scale * fractional_weight_quadrature(alpha, beta, dim,
                                                          tol));
        return;
      }
      for (int b = -M; b <= M; ++b) {
        beta[d] = b;
        rec(d + 1);
      }
    };
    rec(0);
    const double total = scale * fractional_total_mass(alpha, dim, tol);
    op.set_tail_mass(std::max(0.0, total - op.total_mass()));
  }
  op.set_provenance("fractional_semigroup");
  return op;
}

DiscreteOperator local_laplacian_operator(double h, int dim) {
  DiscreteOperator op(dim, h);
  for (int i = 0; i < dim; ++i) {
    MultiIndex beta{};
    beta[i] = 1;
    op.add_symmetric_pair(beta, 1.0 / (h * h));
  }
  op.set_provenance("local_laplacian");
  return op;
}

DiscreteOperator sigma_operator(const std::vector<Coord>& sigma_columns,
                                double h, int dim, double eta) {
  if (eta <= 0.0) throw std::invalid_argument("sigma: eta must be positive");
  DiscreteOperator op(dim, h);
  std::map<MultiIndex, double> acc;
  for (const Coord& col : sigma_columns) {
    for (int sign : {+1, -1}) {
      // multilinear spread of the point mass at sign * eta * col
      std::array<int, kMaxDim> base{};
      std::array<double, kMaxDim> theta{};
      for (int i = 0; i < dim; ++i) {
        const double p = sign * eta * col[i] / h;
        base[i] = int(std::floor(p));
        theta[i] = p - base[i];
      }
      const int corners = 1 << dim;
      for (int c = 0; c < corners; ++c) {
        MultiIndex beta{};
        double w = 1.0 / (eta * eta);
        for (int i = 0; i < dim; ++i) {
          const bool up = (c >> i) & 1;
          beta[i] = base[i] + (up ? 1 : 0);
          w *= up ? theta[i] : 1.0 - theta[i];
        }
        if (w > 0.0 && !is_zero_offset(beta, dim)) acc[beta] += w;
      }
    }
  }
  for (const auto& [beta, w] : acc) op.add_entry(beta, w);
  op.validate();
  op.set_provenance("sigma");
  return op;
}

void dump_operator(std::ostream& out, const DiscreteOperator& op) {
  out.precision(17);
  out << "# dim " << op.dim() << "\n# h " << op.h() << "\n# total_mass "
      << op.total_mass() << "\n# tail_mass " << op.tail_mass()
      << "\n# provenance " << op.provenance() << "\n";
  for (const auto& e : op.entries()) {
    for (int i = 0; i < op.dim(); ++i) out << e.offset[i] << ' ';
    out << e.weight << "\n";
  }
}

}  // namespace nlpme
