#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "logcave/oracle.hpp"
#include "logcave/rng.hpp"

using namespace logcave;

TEST_CASE("two-point sample gives the uniform fit", "[oracle]") {
  auto s = SortedSample::from_raw({0.0, 1.0});
  auto r = fit_exact_small(s);
  CHECK(r.best.psi == Catch::Approx(-1.0).margin(1e-10));
  CHECK(r.best.loglik == Catch::Approx(0.0).margin(1e-10));
  CHECK(sup_distance(r.best.estimate, PwlConcave({0, 1}, {0, 0})) < 1e-8);

  auto rc = fit_exact_small(s, 0.5);
  CHECK(rc.best.psi == Catch::Approx(r.best.psi).margin(1e-10));
  CHECK(sup_distance(rc.best.estimate, r.best.estimate) < 1e-8);
}

TEST_CASE("skewed three-point sample beats the uniform", "[oracle]") {
  auto s = SortedSample::from_raw({0.0, 0.1, 1.0});
  auto r = fit_exact_small(s);
  // the uniform log-density on [0,1] has Psi_n = -1 and is one of the
  // enumerated configurations
  CHECK(r.best.psi > -1.0 + 1e-6);
  CHECK(r.subsets_tried >= 2);
}

TEST_CASE("translation equivariance of the optimum", "[oracle]") {
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> raw;
    for (int i = 0; i < 5; ++i) raw.push_back(rng.normal());
    auto s = SortedSample::from_raw(raw);
    const double c = 3.7;
    std::vector<double> shifted = raw;
    for (double& x : shifted) x += c;
    auto s2 = SortedSample::from_raw(shifted);
    const double m = raw[0] + 0.3;
    auto a = fit_exact_small(s, m);
    auto b = fit_exact_small(s2, m + c);
    REQUIRE(a.best.psi == Catch::Approx(b.best.psi).margin(1e-10));
  }
}

TEST_CASE("constrained optimum never beats the unconstrained", "[oracle]") {
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> raw;
    for (int i = 0; i < 6; ++i) raw.push_back(2 * rng.uniform());
    auto s = SortedSample::from_raw(raw);
    const double m = 2 * rng.uniform();
    auto u = fit_exact_small(s);
    auto c = fit_exact_small(s, m);
    REQUIRE(c.best.psi <= u.best.psi + 1e-10);
  }
}

TEST_CASE("oracle rejects instances beyond N = 8", "[oracle]") {
  std::vector<double> raw;
  for (int i = 0; i < 9; ++i) raw.push_back(i);
  auto s = SortedSample::from_raw(raw);
  CHECK_THROWS_AS(fit_exact_small(s), OracleTooLargeError);
}
