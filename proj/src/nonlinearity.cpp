#include "nlpme/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nlpme/quadrature.hpp"

namespace nlpme {

double Nonlinearity::operator()(double zeta) const {
  switch (kind) {
    case Kind::kIdentity:
      return zeta;
    case Kind::kPower:
      return zeta == 0.0 ? 0.0
                         : std::copysign(std::pow(std::abs(zeta), m), zeta);
    case Kind::kStefan:
      return std::max(0.0, a * zeta - b) - std::max(0.0, -b);
    case Kind::kCustom:
      return custom(zeta);
  }
  return 0.0;
}

Nonlinearity identity_nonlinearity() { return Nonlinearity{}; }

Nonlinearity power_nonlinearity(double m) {
  if (m <= 0.0) throw std::invalid_argument("power nonlinearity: m > 0");
  Nonlinearity phi;
  phi.kind = Nonlinearity::Kind::kPower;
  phi.m = m;
  return phi;
}

Nonlinearity stefan_nonlinearity(double a, double b) {
  if (a < 0.0) throw std::invalid_argument("stefan nonlinearity: a >= 0");
  Nonlinearity phi;
  phi.kind = Nonlinearity::Kind::kStefan;
  phi.a = a;
  phi.b = b;
  return phi;
}

Nonlinearity custom_nonlinearity(std::function<double(double)> f,
                                 std::function<double(double)> lipschitz) {
  if (!f) throw std::invalid_argument("custom nonlinearity: null function");
  if (std::abs(f(0.0)) > 0.0)
    throw std::invalid_argument("custom nonlinearity: phi(0) must be 0");
  Nonlinearity phi;
  phi.kind = Nonlinearity::Kind::kCustom;
  phi.custom = std::move(f);
  phi.custom_lipschitz = std::move(lipschitz);
  return phi;
}

std::optional<double> lipschitz_bound(const Nonlinearity& phi, double M) {
  if (M < 0.0) throw std::invalid_argument("lipschitz_bound: M >= 0");
  switch (phi.kind) {
    case Nonlinearity::Kind::kIdentity:
      return 1.0;
    case Nonlinearity::Kind::kPower:
      if (phi.m >= 1.0) return phi.m * std::pow(M, phi.m - 1.0);
      return M == 0.0 ? std::optional<double>(0.0) : std::nullopt;
    case Nonlinearity::Kind::kStefan:
      return phi.a;
    case Nonlinearity::Kind::kCustom:
      if (phi.custom_lipschitz) return phi.custom_lipschitz(M);
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

// bump mollifier omega(t) = C exp(-1/(1-t^2)) on (-1,1), discretized on the
// fixed 64-node Gauss rule and normalized by the same rule so that constants
// mollify exactly and symmetry kills the linear moment to rounding
struct MollifierRule {
  std::vector<double> nodes, weights;
  MollifierRule() {
    const GLNodes& gl = gl64();
    double total = 0.0;
    for (size_t k = 0; k < gl.x.size(); ++k) {
      const double t = gl.x[k];
      const double w = gl.w[k] * std::exp(-1.0 / (1.0 - t * t));
      nodes.push_back(t);
      weights.push_back(w);
      total += w;
    }
    for (double& w : weights) w /= total;
  }
};

const MollifierRule& mollifier() {
  static const MollifierRule rule;
  return rule;
}

}  // namespace

RegularizedNonlinearity regularize(const Nonlinearity& phi, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("regularize: delta > 0");
  RegularizedNonlinearity out;
  out.base = phi;
  out.delta = delta;
  using Kind = Nonlinearity::Kind;
  if (phi.kind == Kind::kIdentity ||
      (phi.kind == Kind::kPower && phi.m == 1.0)) {
    out.pwl.slope = 1.0;
    out.pwl.valid = true;
  } else if (phi.kind == Kind::kStefan) {
    out.pwl.slope = phi.a;
    out.pwl.valid = true;
    if (phi.a > 0.0) {
      const MollifierRule& rule = mollifier();
      std::vector<std::pair<double, double>> kw;
      for (size_t k = 0; k < rule.nodes.size(); ++k)
        kw.emplace_back((phi.b + delta * rule.nodes[k]) / phi.a,
                        rule.weights[k]);
      std::sort(kw.begin(), kw.end());
      out.pwl.wsum.push_back(0.0);
      out.pwl.wksum.push_back(0.0);
      for (auto& [kink, w] : kw) {
        out.pwl.kinks.push_back(kink);
        out.pwl.wsum.push_back(out.pwl.wsum.back() + w);
        out.pwl.wksum.push_back(out.pwl.wksum.back() + w * kink);
        out.pwl.offset -= phi.a * w * std::max(0.0, -kink);
      }
    }
  }
  return out;
}

double RegularizedNonlinearity::operator()(double zeta) const {
  if (pwl.valid) {
    if (pwl.kinks.empty()) return pwl.slope * zeta + delta * zeta;
    const size_t c = std::lower_bound(pwl.kinks.begin(), pwl.kinks.end(),
                                      zeta) -
                     pwl.kinks.begin();
    return base.a * (zeta * pwl.wsum[c] - pwl.wksum[c]) + pwl.offset +
           delta * zeta;
  }
  const MollifierRule& rule = mollifier();
  double conv = 0.0, conv0 = 0.0;
  for (size_t k = 0; k < rule.nodes.size(); ++k) {
    const double y = delta * rule.nodes[k];
    conv += rule.weights[k] * base(zeta - y);
    conv0 += rule.weights[k] * base(-y);
  }
  return conv - conv0 + delta * zeta;
}

double RegularizedNonlinearity::lipschitz_estimate(double M) const {
  if (M < 0.0) throw std::invalid_argument("lipschitz_estimate: M >= 0");
  if (M == 0.0) return delta;
  const int samples = 4096;
  const double step = 2.0 * M / samples;
  double worst = 0.0;
  double prev = (*this)(-M);
  for (int i = 1; i <= samples; ++i) {
    const double cur = (*this)(-M + i * step);
    worst = std::max(worst, (cur - prev) / step);
    prev = cur;
  }
  // margin for the sampling resolution; slope is >= delta by construction
  return std::max(1.05 * worst, delta);
}

double phi_inverse_shifted(const std::function<double(double)>& phi, double m,
                           double y, double tol, double guess) {
  if (m < 0.0) throw std::invalid_argument("phi_inverse_shifted: m >= 0");
  // Phi(w) = w + m phi(w) has Phi(0) = 0 and |Phi(w)| >= |w| with matching
  // sign, so the root lies between 0 and y.
  double lo = std::min(0.0, y), hi = std::max(0.0, y);
  auto g = [&](double w) { return w + m * phi(w) - y; };
  const double stop = tol * (1.0 + std::abs(y));
  double w = (std::isfinite(guess) && guess > lo && guess < hi)
                 ? guess
                 : 0.5 * (lo + hi);
  double gw = g(w);
  double w_prev = lo, g_prev = g(lo);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(gw) <= stop) return w;
    if (gw > 0.0)
      hi = w;
    else
      lo = w;
    double next;
    const double dg = gw - g_prev;
    if (std::abs(dg) > 0.0) {
      next = w - gw * (w - w_prev) / dg;  // secant
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    } else {
      next = 0.5 * (lo + hi);
    }
    if (hi - lo <= 1e-16 * (1.0 + std::abs(w))) return w;
    w_prev = w;
    g_prev = gw;
    w = next;
    gw = g(w);
  }
  return w;
}

}  // namespace nlpme
