#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "logcave/experiments.hpp"

using namespace logcave;

TEST_CASE("replications are reproducible", "[mc][rates]") {
  auto d = TrueDensity::standard_normal();
  auto r1 = rate_experiment(d, RateMetric::hellinger, {100, 200}, 8, 99, true);
  auto r2 = rate_experiment(d, RateMetric::hellinger, {100, 200}, 8, 99, true);
  REQUIRE(r1.median_errors == r2.median_errors);
  REQUIRE(r1.slope == r2.slope);
}

TEST_CASE("hellinger error decreases along the n grid", "[mc][rates]") {
  auto d = TrueDensity::standard_normal();
  auto r = rate_experiment(d, RateMetric::hellinger, {100, 300, 1000}, 40, 7, true);
  REQUIRE(r.median_errors.size() == 3);
  int inversions = 0;
  for (std::size_t i = 0; i + 1 < r.median_errors.size(); ++i)
    if (r.median_errors[i + 1] > r.median_errors[i]) ++inversions;
  CHECK(inversions <= 1);
  CHECK(r.slope < -0.2);
  CHECK(r.skipped == 0);
}

TEST_CASE("knot gap shrinks at roughly the n^{-1/5} rate", "[mc][rates]") {
  auto d = TrueDensity::standard_normal();
  auto r = rate_experiment(d, RateMetric::knot_gap, {100, 400, 1600}, 40, 11, true);
  CHECK(r.slope > -0.45);
  CHECK(r.slope < -0.05);
}

TEST_CASE("misspecified mode keeps the error off the floor", "[mc][rates]") {
  // truth N(0,1) but m = 1 specified: the constrained fit converges to the
  // projection, not the truth, so the Hellinger error stalls at a positive
  // level (~0.044) while the well-specified error keeps falling
  auto d = TrueDensity::standard_normal();
  std::vector<long> ns{100, 3000};
  std::vector<double> mis, well;
  for (long n : ns) {
    std::vector<double> e1, e2;
    for (int rep = 0; rep < 30; ++rep) {
      auto s = sample_density(d, n, mix_seed(5, n, rep));
      e1.push_back(hellinger(fit_constrained(s, 1.0).estimate, d));
      e2.push_back(hellinger(fit_constrained(s, 0.0).estimate, d));
    }
    std::sort(e1.begin(), e1.end());
    std::sort(e2.begin(), e2.end());
    mis.push_back(e1[e1.size() / 2]);
    well.push_back(e2[e2.size() / 2]);
  }
  // the misspecified error cannot fall below its projection floor; the
  // n=100 median still carries finite-sample error, hence the 0.35 factor
  CHECK(mis[1] >= 0.35 * mis[0]);
  CHECK(mis[1] > 0.03);
  CHECK(mis[1] >= 1.5 * well[1]);
}

TEST_CASE("single-n rate design leaves the slope undefined", "[mc][rates]") {
  auto d = TrueDensity::standard_normal();
  auto r = rate_experiment(d, RateMetric::hellinger, {100}, 10, 3, true);
  CHECK(std::isnan(r.slope));
  REQUIRE(r.median_errors.size() == 1);
}

TEST_CASE("figure panels satisfy the endpoint identities", "[mc][panels]") {
  auto d = TrueDensity::standard_normal();
  auto s = sample_density(d, 20, 0);
  PanelTable t = figure_panels(s, 0.0, SolverOptions{}, &d);
  REQUIRE(t.x.size() == 512);
  // (Y_L - H_L)(X_(1)) = 0 and (Y_R - H_R)(X_(n)) = 0
  EmpiricalProcesses emp(s);
  FittedProcesses fit(t.constrained_fit.estimate, s.min(), s.max());
  CHECK(std::abs(emp.yl(s.min()) - fit.hl(s.min())) <= 1e-10);
  CHECK(std::abs(emp.yr(s.max()) - fit.hr(s.max())) <= 1e-10);
  CHECK(t.worst_negativity >= -1e-8);
  CHECK(t.worst_knot_gap <= 1e-8);
  // emitted curves carry the truth when given
  CHECK(std::isfinite(t.f_true[100]));
  int knot_marks = 0;
  for (int k : t.knot_con) knot_marks += k;
  CHECK(knot_marks >= 2);
  // deterministic
  PanelTable t2 = figure_panels(s, 0.0, SolverOptions{}, &d);
  REQUIRE(t.yl_minus_hl == t2.yl_minus_hl);
}

TEST_CASE("figure panels for the other scenarios", "[mc][panels]") {
  for (int scenario = 0; scenario < 3; ++scenario) {
    TrueDensity d = scenario == 0   ? TrueDensity::gumbel()
                    : scenario == 1 ? TrueDensity::gamma_shape2()
                                    : TrueDensity::standard_normal();
    const double m = (scenario == 2) ? 1.0 : d.mode; // misspecified normal
    auto s = sample_density(d, 200, 1);
    PanelTable t = figure_panels(s, m, SolverOptions{}, &d);
    CHECK(t.worst_negativity >= -1e-8);
    CHECK(t.worst_knot_gap <= 1e-8);
  }
}
