#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "logcave/exp_kernels.hpp"
#include "logcave/rng.hpp"
#include "test_support.hpp"

using namespace logcave;

namespace {

// 20-term Taylor oracle: j00(r, r+h) = e^r sum_k h^k/(k+1)!
double j00_taylor(double r, double h) {
  double sum = 0, term = 1, fact = 1;
  for (int k = 0; k <= 20; ++k) {
    fact = (k == 0) ? 1.0 : fact * (k + 1);
    sum += term / fact;
    term *= h;
  }
  return std::exp(r) * sum;
}

} // namespace

TEST_CASE("j00 closed-form values", "[kernels]") {
  CHECK(j00(0, 0) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(j00(0, std::log(2.0)) == Catch::Approx(1.0 / std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("j00 near-diagonal matches the Taylor oracle", "[kernels]") {
  const double h = 1e-9;
  CHECK(std::abs(j00(0, h) - (1 + h / 2)) < 1e-12);
  CHECK(std::abs(j00(0, h) - j00_taylor(0, h)) < 1e-15);
  for (double r : {-3.0, 0.0, 2.5}) {
    for (double h2 : {1e-12, 1e-8, 1e-6, 1e-5}) {
      CHECK(j00(r, r + h2) == Catch::Approx(j00_taylor(r, h2)).epsilon(1e-13));
    }
  }
}

TEST_CASE("j00 symmetry and Gauss-Legendre agreement", "[kernels]") {
  Rng rng(1234);
  for (int rep = 0; rep < 10000; ++rep) {
    const double r = 60 * rng.uniform() - 30;
    const double s = 60 * rng.uniform() - 30;
    const double a = j00(r, s), b = j00(s, r);
    REQUIRE(a > 0);
    REQUIRE(std::abs(a - b) <= 1e-12 * std::max(a, b));
  }
  // 200-point Gauss-Legendre of the defining integral
  Rng rng2(99);
  for (int rep = 0; rep < 200; ++rep) {
    const double r = 60 * rng2.uniform() - 30;
    const double s = 60 * rng2.uniform() - 30;
    const double q = testsupport::gl_integrate(
        [&](double t) { return std::exp((1 - t) * r + t * s); }, 0, 1, 200);
    REQUIRE(std::abs(j00(r, s) - q) <= 1e-12 * q);
  }
}

TEST_CASE("derivative kernels match their defining integrals", "[kernels]") {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const double r = 8 * rng.uniform() - 4;
    const double s = 8 * rng.uniform() - 4;
    const double q10 = testsupport::gl_integrate(
        [&](double t) { return (1 - t) * std::exp((1 - t) * r + t * s); }, 0, 1, 80);
    const double q20 = testsupport::gl_integrate(
        [&](double t) { return (1 - t) * (1 - t) * std::exp((1 - t) * r + t * s); },
        0, 1, 80);
    const double q11 = testsupport::gl_integrate(
        [&](double t) { return t * (1 - t) * std::exp((1 - t) * r + t * s); }, 0, 1,
        80);
    CHECK(j10(r, s) == Catch::Approx(q10).epsilon(1e-12));
    CHECK(j20(r, s) == Catch::Approx(q20).epsilon(1e-12));
    CHECK(j11(r, s) == Catch::Approx(q11).epsilon(1e-12));
    CHECK(j01(r, s) == Catch::Approx(j10(s, r)).epsilon(1e-15));
  }
}

TEST_CASE("kernels are continuous across the series threshold", "[kernels]") {
  for (double base : {-2.0, 0.0, 3.0}) {
    for (double d : {0.0199999, 0.0200001}) {
      const double a = j10(base, base + d);
      const double q = testsupport::gl_integrate(
          [&](double t) { return (1 - t) * std::exp((1 - t) * base + t * (base + d)); },
          0, 1, 80);
      CHECK(a == Catch::Approx(q).epsilon(1e-12));
    }
  }
}

TEST_CASE("j00 saturates instead of producing NaN", "[kernels]") {
  const double v = j00(-745.0, -760.0);
  CHECK(std::isfinite(v));
  CHECK(v >= 0);
  CHECK(std::isfinite(j00(-1000.0, -1000.0)));
}
