#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "logcave/pwl.hpp"
#include "logcave/rng.hpp"
#include "test_support.hpp"

using namespace logcave;

TEST_CASE("exp_integral closed forms", "[pwl]") {
  CHECK(PwlConcave({0, 1}, {0, 0}).exp_integral() == Catch::Approx(1.0));
  CHECK(PwlConcave({0, 1}, {0, 1}).exp_integral() ==
        Catch::Approx(std::exp(1.0) - 1).epsilon(1e-14));
  CHECK(PwlConcave({0, 1, 2}, {0, 1, 0}).exp_integral() ==
        Catch::Approx(2 * (std::exp(1.0) - 1)).epsilon(1e-14));
}

TEST_CASE("cdf closed forms and consistency", "[pwl]") {
  PwlConcave uni({0, 1}, {0, 0});
  CHECK(uni.cdf(0.5) == Catch::Approx(0.5));
  CHECK(uni.cdf(0.0) == 0.0);
  PwlConcave ramp({0, 1}, {0, 1});
  CHECK(ramp.cdf(1.0) == Catch::Approx(std::exp(1.0) - 1).epsilon(1e-14));
  // same summation as exp_integral, exactly
  PwlConcave tent({0, 0.3, 1.7, 2}, {-1, 0.5, 0.4, -2});
  CHECK(tent.cdf(tent.knots().back()) == tent.exp_integral());
}

TEST_CASE("mean_var closed forms", "[pwl]") {
  auto [m1, v1] = PwlConcave({0, 1}, {0, 0}).mean_var();
  CHECK(m1 == Catch::Approx(0.5).margin(1e-14));
  CHECK(v1 == Catch::Approx(1.0 / 12).epsilon(1e-12));
  auto [m2, v2] = PwlConcave({-1, 1}, {std::log(0.5), std::log(0.5)}).mean_var();
  CHECK(m2 == Catch::Approx(0.0).margin(1e-14));
  CHECK(v2 == Catch::Approx(1.0 / 3).epsilon(1e-12));
  auto [m3, v3] = PwlConcave({0, 1}, {0, 1}).mean_var();
  CHECK(m3 == Catch::Approx(1.0 / (std::exp(1.0) - 1)).epsilon(1e-12));
  (void)v3;
}

namespace {

PwlConcave random_concave(logcave::Rng& rng, int max_knots = 10) {
  const int k = 2 + static_cast<int>(rng.uniform() * (max_knots - 1));
  std::vector<double> knots(k), slopes(k - 1), values(k);
  knots[0] = 4 * rng.uniform() - 2;
  for (int i = 1; i < k; ++i) knots[i] = knots[i - 1] + 0.05 + 2 * rng.uniform();
  // nonincreasing slopes
  double s = 3 * rng.uniform();
  for (int i = 0; i < k - 1; ++i) {
    slopes[i] = s;
    s -= 0.01 + 2 * rng.uniform();
  }
  values[0] = 2 * rng.uniform() - 1;
  for (int i = 1; i < k; ++i)
    values[i] = values[i - 1] + slopes[i - 1] * (knots[i] - knots[i - 1]);
  return PwlConcave(knots, values);
}

} // namespace

TEST_CASE("mean_var matches the adaptive-quadrature oracle", "[pwl]") {
  logcave::Rng rng(42);
  for (int rep = 0; rep < 100; ++rep) {
    // normalized so the quadrature tolerance is meaningful on all instances
    PwlConcave f = random_concave(rng).normalized();
    auto [mean, var] = f.mean_var();
    const double m0 = testsupport::adaptive_simpson(
        [&](double x) { return f.density(x); }, f.domain_lo(), f.domain_hi(), 1e-13);
    const double m1 = testsupport::adaptive_simpson(
        [&](double x) { return x * f.density(x); }, f.domain_lo(), f.domain_hi(),
        1e-13);
    const double m2 = testsupport::adaptive_simpson(
        [&](double x) { return x * x * f.density(x); }, f.domain_lo(),
        f.domain_hi(), 1e-13);
    const double qmean = m1 / m0;
    const double qvar = m2 / m0 - qmean * qmean;
    REQUIRE(mean == Catch::Approx(qmean).epsilon(1e-9));
    REQUIRE(var == Catch::Approx(qvar).epsilon(1e-9).margin(1e-12));
  }
}

TEST_CASE("knot_class", "[pwl]") {
  CHECK(PwlConcave({0, 1}, {0, 0}).knot_class(0.5) == KnotClass::NK);
  CHECK(PwlConcave({0, 1, 2}, {0, 1, 1}).knot_class(1.0) == KnotClass::LK);
  CHECK(PwlConcave({0, 1, 2}, {0, 1, 0}).knot_class(1.0) == KnotClass::BOTH);
  CHECK(PwlConcave({0, 1, 2}, {1, 1, 0}).knot_class(1.0) == KnotClass::RK);
  // mode constraint violated at m
  CHECK_THROWS_AS(PwlConcave({0, 1, 2}, {0, 1, 0}).knot_class(0.5),
                  ModeInfeasibleError);
  // m outside the domain
  CHECK_THROWS_AS(PwlConcave({0, 1}, {0, 0}).slopes_at(3.0), DomainMismatchError);
}

TEST_CASE("construction rejects non-concave values", "[pwl]") {
  CHECK_THROWS(PwlConcave({0, 1, 2}, {0, -1, 0.5}));
  CHECK_THROWS(PwlConcave({0, 0, 1}, {0, 0, 0}));
  // a 1e-12 wiggle is inside the concavity tolerance
  CHECK_NOTHROW(PwlConcave({0, 1, 2}, {0.0, 0.0, 1e-12}));
}

TEST_CASE("kink detection and normalization", "[pwl]") {
  PwlConcave f({0, 1, 2, 3}, {0, 1, 1.999999999999, 2});
  // middle knots: one genuine kink at index 1, the slope change at 2 is below
  // threshold only if tiny; here slopes are 1, ~1, ~0 so index 2 kinks too
  auto kinks = f.kink_indices();
  REQUIRE(!kinks.empty());
  PwlConcave g = PwlConcave({0, 2}, {3, 3}).normalized();
  CHECK(g.exp_integral() == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sup_distance uses breakpoints of both", "[pwl]") {
  PwlConcave a({0, 2}, {0, 0});
  PwlConcave b({0, 1, 2}, {0, 0.5, 0});
  CHECK(sup_distance(a, b) == Catch::Approx(0.5));
}
