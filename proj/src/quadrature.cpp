#include "nlpme/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace nlpme {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const Fn1& f, double a, double fa, double b,
                            double fb, double fm, double whole, double tol,
                            int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double err = left + right - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * tol)
    return left + right + err / 15.0;
  return adaptive_simpson_rec(f, a, fa, m, fm, flm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, frm, right, 0.5 * tol,
                              depth - 1);
}

// Legendre polynomial nodes/weights via Newton iteration.
void legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

std::mutex g_rule_mutex;
std::map<int, std::pair<std::vector<double>, std::vector<double>>> g_rules;

const std::pair<std::vector<double>, std::vector<double>>& rule(int n) {
  std::lock_guard<std::mutex> lock(g_rule_mutex);
  auto it = g_rules.find(n);
  if (it == g_rules.end()) {
    std::vector<double> x, w;
    legendre_rule(n, x, w);
    it = g_rules.emplace(n, std::make_pair(std::move(x), std::move(w))).first;
  }
  return it->second;
}

}  // namespace

double adaptive_simpson(const Fn1& f, double a, double b, double abs_tol,
                        int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive_simpson_rec(f, a, fa, b, fb, fm, whole, abs_tol, max_depth);
}

double tanh_sinh(const Fn1& f, double a, double b, double abs_tol,
                 int max_level) {
  if (a == b) return 0.0;
  const double hw = 0.5 * (b - a);
  // transformed integrand on t in (-inf, inf)
  auto g = [&](double t) -> double {
    const double q = 0.5 * M_PI * std::sinh(t);
    // distance to the near endpoint, hw (1 - |tanh q|), computed without
    // cancellation so integrable endpoint singularities keep full accuracy
    const double eq = std::exp(-2.0 * std::abs(q));
    const double off = hw * 2.0 * eq / (1.0 + eq);
    if (off <= 0.0) return 0.0;
    const double pos = q < 0.0 ? a + off : b - off;
    if (pos <= a || pos >= b) return 0.0;  // collapsed by rounding
    const double sech = 2.0 * std::exp(-std::abs(q)) / (1.0 + eq);
    const double dxdt = 0.5 * M_PI * std::cosh(t) * sech * sech;
    const double v = f(pos);
    if (!std::isfinite(v)) return 0.0;
    return v * hw * dxdt;
  };
  const double tmax = 6.5;  // transformed tails are below 1e-16 here
  double h = 1.0;
  double prev = h * g(0.0);
  {
    double s = 0.0;
    for (double t = h; t <= tmax; t += h) s += g(t) + g(-t);
    prev += h * s;
  }
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    double s = 0.0;
    for (double t = h; t <= tmax; t += 2.0 * h) s += g(t) + g(-t);
    const double cur = 0.5 * prev + h * s;
    if (level >= 3 && std::abs(cur - prev) <= abs_tol) return cur;
    prev = cur;
  }
  return prev;
}

double gauss_legendre(const Fn1& f, double a, double b, int n) {
  const auto& r = rule(n);
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += r.second[i] * f(c + hw * r.first[i]);
  return s * hw;
}

const GLNodes& gl64() {
  static const GLNodes nodes = [] {
    GLNodes g;
    std::vector<double> x, w;
    legendre_rule(64, x, w);
    for (int i = 0; i < 64; ++i) {
      g.x[i] = x[i];
      g.w[i] = w[i];
    }
    return g;
  }();
  return nodes;
}

}  // namespace nlpme
