#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "logcave/densities.hpp"

using namespace logcave;

TEST_CASE("density values at the modes", "[densities]") {
  CHECK(TrueDensity::standard_normal().density(0.0) ==
        Catch::Approx(1.0 / std::sqrt(2 * M_PI)).epsilon(1e-14));
  CHECK(TrueDensity::gumbel().density(0.0) ==
        Catch::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(TrueDensity::gamma_shape2().density(1.0) ==
        Catch::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("modes and curvature", "[densities]") {
  CHECK(TrueDensity::standard_normal().mode == 0.0);
  CHECK(TrueDensity::gumbel().mode == 0.0);
  CHECK(TrueDensity::gamma_shape2().mode == 1.0);
  CHECK(TrueDensity::standard_normal().curvature_at_mode == -1.0);
  CHECK(TrueDensity::gumbel().curvature_at_mode == -1.0);
  CHECK(TrueDensity::gamma_shape2().curvature_at_mode == -1.0);
}

TEST_CASE("cdf and quantile are inverse", "[densities]") {
  for (auto d : {TrueDensity::standard_normal(), TrueDensity::gumbel(),
                 TrueDensity::gamma_shape2()}) {
    for (double p : {0.01, 0.25, 0.5, 0.75, 0.99}) {
      const double x = d.quantile(p);
      CHECK(d.cdf(x) == Catch::Approx(p).margin(1e-9));
    }
  }
  PwlConcave tent({0, 0.5, 1}, {0, 1, 0});
  auto d = TrueDensity::custom(tent);
  CHECK(d.mode == Catch::Approx(0.5));
  for (double p : {0.1, 0.5, 0.9})
    CHECK(d.cdf(d.quantile(p)) == Catch::Approx(p).margin(1e-12));
}

TEST_CASE("sampling is deterministic and roughly calibrated", "[densities]") {
  auto d = TrueDensity::standard_normal();
  auto s1 = sample_density(d, 500, 42);
  auto s2 = sample_density(d, 500, 42);
  REQUIRE(s1.points == s2.points);
  REQUIRE(s1.weights == s2.weights);
  auto s3 = sample_density(d, 500, 43);
  CHECK(s1.points != s3.points);

  auto big = sample_density(d, 20000, 7);
  CHECK(big.mean() == Catch::Approx(0.0).margin(0.05));
  CHECK(big.variance() == Catch::Approx(1.0).epsilon(0.05));

  auto gum = sample_density(TrueDensity::gumbel(), 20000, 7);
  CHECK(gum.mean() == Catch::Approx(0.5772156649).margin(0.05));

  auto gam = sample_density(TrueDensity::gamma_shape2(), 20000, 7);
  CHECK(gam.mean() == Catch::Approx(2.0).epsilon(0.03));
  CHECK(gam.min() > 0);
}

TEST_CASE("custom density sampler stays in the domain", "[densities]") {
  PwlConcave tent({-1, 0.25, 2}, {-2, 0.5, -1});
  auto d = TrueDensity::custom(tent);
  auto s = sample_density(d, 2000, 11);
  CHECK(s.min() >= -1.0);
  CHECK(s.max() <= 2.0);
  CHECK(s.ecdf(0.25) == Catch::Approx(d.cdf(0.25)).margin(0.05));
}
