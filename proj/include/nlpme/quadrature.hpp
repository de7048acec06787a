#pragma once

#include <array>
#include <functional>

namespace nlpme {

using Fn1 = std::function<double(double)>;

/// Adaptive Simpson on [a,b]; recursion stops when the local error estimate
/// is below the split tolerance. abs_tol is an absolute tolerance on the
/// whole integral.
double adaptive_simpson(const Fn1& f, double a, double b, double abs_tol,
                        int max_depth = 60);

/// tanh-sinh (double exponential) quadrature on (a,b). Handles integrable
/// endpoint singularities. Refines the level until two consecutive levels
/// agree to abs_tol or max_level is hit.
double tanh_sinh(const Fn1& f, double a, double b, double abs_tol,
                 int max_level = 12);

/// Fixed Gauss-Legendre rules mapped to [a,b].
double gauss_legendre(const Fn1& f, double a, double b, int n);

struct GLNodes {
  std::array<double, 64> x;  // nodes on (-1,1)
  std::array<double, 64> w;
};
const GLNodes& gl64();

}  // namespace nlpme
