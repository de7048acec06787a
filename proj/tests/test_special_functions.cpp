#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "nlpme/special_functions.hpp"

using namespace nlpme;

TEST_CASE("gamma matches high-precision references") {
  CHECK(gamma_fn(0.5) == doctest::Approx(1.772453850905516).epsilon(1e-13));
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-13));
  CHECK(gamma_fn(3.7) == doctest::Approx(4.1706517837966032).epsilon(1e-13));
  // reflection branch
  CHECK(gamma_fn(-0.5) == doctest::Approx(-3.5449077018110321).epsilon(1e-13));
  CHECK(gamma_fn(-2.3) == doctest::Approx(-1.4471073942559173).epsilon(1e-13));
}

TEST_CASE("gamma recurrence x Gamma(x) = Gamma(x+1)") {
  for (double x : {0.1, 0.37, 1.9, 4.5, 11.25}) {
    CHECK(x * gamma_fn(x) == doctest::Approx(gamma_fn(x + 1.0)).epsilon(1e-13));
  }
}

TEST_CASE("gamma poles are rejected") {
  CHECK_THROWS(gamma_fn(0.0));
  CHECK_THROWS(gamma_fn(-3.0));
}

TEST_CASE("log_gamma is consistent with gamma") {
  for (double x : {0.2, 1.0, 2.5, 10.0, 40.0}) {
    CHECK(log_gamma(x) ==
          doctest::Approx(std::log(gamma_fn(x))).epsilon(1e-12));
  }
  CHECK_THROWS(log_gamma(0.0));
  CHECK_THROWS(log_gamma(-1.5));
}

TEST_CASE("scaled Bessel ive matches references") {
  CHECK(bessel_ive(0, 0.0) == 1.0);
  CHECK(bessel_ive(3, 0.0) == 0.0);
  CHECK(bessel_ive(0, 1.0) ==
        doctest::Approx(0.46575960759364044).epsilon(1e-13));
  CHECK(bessel_ive(1, 2.0) ==
        doctest::Approx(0.21526928924893766).epsilon(1e-13));
  CHECK(bessel_ive(3, 7.5) ==
        doctest::Approx(0.078571963371959865).epsilon(1e-13));
  CHECK(bessel_ive(5, 0.3) ==
        doctest::Approx(4.70559854640403e-7).epsilon(1e-12));
  // asymptotic branch
  CHECK(bessel_ive(0, 60.0) ==
        doctest::Approx(0.051611549173609841).epsilon(1e-13));
}

TEST_CASE("ive order symmetry and domain checks") {
  CHECK(bessel_ive(-2, 1.7) == bessel_ive(2, 1.7));
  CHECK_THROWS(bessel_ive(0, -1.0));
}

TEST_CASE("ive normalization identity") {
  // I_0(x) + 2 sum_{k>=1} I_k(x) = e^x, so the scaled sum equals 1
  for (double x : {0.5, 3.0, 12.0, 30.0}) {
    double s = bessel_ive(0, x);
    for (int k = 1; k < 200; ++k) s += 2.0 * bessel_ive(k, x);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
  }
}
