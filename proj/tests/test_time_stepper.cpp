#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "nlpme/time_stepper.hpp"

using namespace nlpme;

namespace {

Field bump_field(const UniformGrid& g) {
  return cell_average(
      [](const Coord& x) { return std::exp(-2.0 * x[0] * x[0]); }, g);
}

}  // namespace

TEST_CASE("CFL bound arithmetic") {
  // L = 1, nu = 2/h^2 with h = 0.1 -> dt <= 0.005
  CHECK(cfl_bound(identity_nonlinearity(), 2.0 / 0.01, 1.0) ==
        doctest::Approx(0.005));
  CHECK(std::isinf(cfl_bound(identity_nonlinearity(), 0.0, 1.0)));
  // unbounded slope with a nonzero explicit mass is inadmissible
  CHECK_THROWS(cfl_bound(power_nonlinearity(0.5), 1.0, 1.0));
}

TEST_CASE("explicit step: identity for zero operator, mass preserved") {
  UniformGrid g(1, 0.1, 4.0);
  const Field u = bump_field(g);
  const auto zero = zero_operator(1, 0.1);
  const Field same = explicit_step(zero, [](double z) { return z; }, u);
  for (std::int64_t i = 0; i < g.size(); ++i)
    CHECK(same.values[i] == u.values[i]);

  const auto spec = fractional_measure(1.0, 1);
  const auto op = midpoint_operator(spec, 0.1, 0.1, 1, 1.0).scaled(0.1);
  const Field stepped = explicit_step(op, [](double z) { return z; }, u);
  CHECK(mass(stepped) == doctest::Approx(mass(u)).epsilon(1e-10));
}

TEST_CASE("explicit step keeps ordered inputs ordered under CFL") {
  UniformGrid g(1, 0.1, 4.0);
  const Field u = bump_field(g);
  Field v = u;
  for (auto& val : v.values) val += 0.2;
  const auto spec = fractional_measure(1.0, 1);
  const auto op = midpoint_operator(spec, 0.1, 0.1, 1, 1.0);
  const double L = *lipschitz_bound(power_nonlinearity(2.0), 2.0);
  const double dt = 0.9 / (L * op.total_mass());
  const auto scaled_op = op.scaled(dt);
  const auto phi = power_nonlinearity(2.0);
  const Field su = explicit_step(scaled_op, [&](double z) { return phi(z); }, u);
  const Field sv = explicit_step(scaled_op, [&](double z) { return phi(z); }, v);
  for (std::int64_t i = 0; i < g.size(); ++i)
    CHECK(su.values[i] <= sv.values[i] + 1e-13);
}

TEST_CASE("source slab averages") {
  UniformGrid g(1, 0.25, 1.0);
  const Field c = source_slab_average(
      [](const Coord&, double) { return 3.0; }, 0.0, 0.5, g);
  for (double v : c.values) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));
  // f(x, t) = t over [0, 1] averages to 1/2
  const Field t = source_slab_average(
      [](const Coord&, double tt) { return tt; }, 0.0, 1.0, g);
  for (double v : t.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  const Field z = source_slab_average(nullptr, 0.0, 1.0, g);
  for (double v : z.values) CHECK(v == 0.0);
}

TEST_CASE("advance: trivial scheme is the identity") {
  UniformGrid g(1, 0.25, 2.0);
  const Field u = bump_field(g);
  SchemeConfig cfg;
  cfg.op1 = zero_operator(1, 0.25);
  cfg.op2 = zero_operator(1, 0.25);
  cfg.times = TimeGrid::uniform(1.0, 4);
  auto [next, rep] = advance(u, cfg, 1);
  for (std::int64_t i = 0; i < g.size(); ++i)
    CHECK(next.values[i] == doctest::Approx(u.values[i]).epsilon(1e-14));
}

TEST_CASE("pure implicit advance equals a direct implicit solve") {
  UniformGrid g(1, 0.25, 2.0);
  const Field u = bump_field(g);
  const auto spec = fractional_measure(1.0, 1);
  SchemeConfig cfg;
  cfg.op1 = midpoint_operator(spec, 0.25, 0.25, 1, 1.0);
  cfg.phi1 = stefan_nonlinearity(1.0, 0.5);
  cfg.op2 = zero_operator(1, 0.25);
  cfg.times = TimeGrid::uniform(1.0, 4);
  cfg.tol = 1e-11;
  auto [next, rep] = advance(u, cfg, 1);
  auto [direct, rep2] = solve_implicit(cfg.op1.scaled(0.25), cfg.phi1, u,
                                       1e-11, default_delta_schedule(0.25));
  for (std::int64_t i = 0; i < g.size(); ++i)
    CHECK(next.values[i] == doctest::Approx(direct.values[i]).epsilon(1e-10));
}

TEST_CASE("run refuses CFL violations under enforce, warns otherwise") {
  UniformGrid g(1, 0.1, 4.0);
  const Field u = bump_field(g);
  SchemeConfig cfg;
  cfg.op1 = zero_operator(1, 0.1);
  cfg.op2 = local_laplacian_operator(0.1, 1);  // nu = 200
  cfg.phi2 = identity_nonlinearity();
  cfg.times = TimeGrid::uniform(0.1, 10);  // dt = 0.01 > 1/200
  cfg.cfl = CflPolicy::kEnforce;
  CHECK_THROWS(run(cfg, u));
  cfg.cfl = CflPolicy::kOff;
  const Trajectory traj = run(cfg, u);  // proceeds (and misbehaves) silently
  CHECK(traj.fields.size() == 11);
}

TEST_CASE("run under CFL: stability, conservation, comparison") {
  UniformGrid g(1, 0.2, 6.0);
  const Field u = bump_field(g);
  const auto spec = fractional_measure(1.0, 1);
  SchemeConfig cfg;
  cfg.op1 = midpoint_operator(spec, 0.2, 0.2, 1, 2.0);
  cfg.phi1 = power_nonlinearity(2.0);
  cfg.op2 = midpoint_operator(spec, 0.2, 0.2, 1, 2.0);
  cfg.phi2 = power_nonlinearity(2.0);
  cfg.times = TimeGrid::uniform(0.5, 25);
  cfg.tol = 1e-11;
  cfg.source = [](const Coord& x, double) {
    return 0.05 * std::exp(-x[0] * x[0]);
  };
  const Trajectory traj = run(cfg, u);
  REQUIRE(traj.fields.size() == 26);
  // Linf stability: max |U^j| <= max |U^0| + sum dt max |F^l|
  double fsum = 0.0;
  for (int j = 1; j <= 25; ++j) fsum += 0.02 * 0.05;
  for (const Field& f : traj.fields)
    CHECK(linf_norm(f) <= linf_norm(u) + fsum + 1e-8);
  // conservation with source
  double expected = mass(u);
  for (int j = 1; j <= 25; ++j) {
    const Field fj = source_slab_average(cfg.source, traj.times.knots[j - 1],
                                         traj.times.knots[j], g);
    expected += 0.02 * mass(fj);
  }
  CHECK(traj.mass_ledger.back() == doctest::Approx(expected).epsilon(1e-8));
  // ordered initial data stays ordered
  Field v = u;
  for (auto& val : v.values) val *= 1.2;
  const Trajectory traj2 = run(cfg, v);
  for (size_t j = 0; j < traj.fields.size(); ++j)
    for (std::int64_t i = 0; i < g.size(); ++i)
      CHECK(traj.fields[j].values[i] <= traj2.fields[j].values[i] + 1e-8);
}

TEST_CASE("grid translation equivariance") {
  UniformGrid g(1, 0.25, 6.0);
  Field u(g);
  // compactly supported data away from the boundary
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const Coord x = g.center(g.unflatten(i));
    u.values[i] = std::abs(x[0]) <= 1.0 ? 1.0 - std::abs(x[0]) : 0.0;
  }
  Field shifted(g);
  for (std::int64_t i = 0; i < g.size(); ++i) {
    MultiIndex idx = g.unflatten(i);
    idx[0] -= 1;
    shifted.values[i] = u.read(idx);
  }
  const auto spec = fractional_measure(1.0, 1);
  SchemeConfig cfg;
  cfg.op1 = midpoint_operator(spec, 0.25, 0.25, 1, 1.0);
  cfg.phi1 = stefan_nonlinearity(1.0, 0.5);
  cfg.op2 = zero_operator(1, 0.25);
  cfg.times = TimeGrid::uniform(0.2, 4);
  cfg.tol = 1e-11;
  const Trajectory a = run(cfg, u);
  const Trajectory b = run(cfg, shifted);
  for (size_t j = 0; j < a.fields.size(); ++j) {
    for (std::int64_t i = 0; i < g.size(); ++i) {
      MultiIndex idx = g.unflatten(i);
      idx[0] -= 1;
      if (!g.in_range(idx)) continue;
      CHECK(b.fields[j].values[i] ==
            doctest::Approx(a.fields[j].at(idx)).epsilon(1e-8));
    }
  }
}

TEST_CASE("theta-split structure reproduces the full operator budget") {
  const auto spec = fractional_measure(1.0, 1);
  const auto full = midpoint_operator(spec, 0.25, 0.25, 1, 1.0);
  const auto half1 = full.scaled(0.5);
  const auto half2 = full.scaled(0.5);
  CHECK(half1.total_mass() + half2.total_mass() ==
        doctest::Approx(full.total_mass()).epsilon(1e-14));
  UniformGrid g(1, 0.25, 4.0);
  const Field u = bump_field(g);
  const Field whole = apply(full, u);
  const Field parts = apply(half1, u) + apply(half2, u);
  for (std::int64_t i = 0; i < g.size(); ++i)
    CHECK(parts.values[i] == doctest::Approx(whole.values[i]).epsilon(1e-13));
}
