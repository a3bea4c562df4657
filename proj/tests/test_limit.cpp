#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "logcave/limit.hpp"
#include "logcave/rng.hpp"

using namespace logcave;

namespace {

DriverPath zero_noise(double half_width, double delta) {
  DriverPath p = simulate_driver(half_width, delta, 0);
  for (int j = 0; j < p.cells(); ++j) {
    const double t0 = p.grid[j], t1 = p.grid[j + 1];
    p.dw[j] = 0;
    p.dx[j] = -4 * (t1 * t1 * t1 - t0 * t0 * t0);
  }
  p.w_half_left = p.w_half_right = 0;
  return p;
}

} // namespace

TEST_CASE("driver grid and deterministic part", "[limit]") {
  DriverPath p = simulate_driver(2.0, 0.01, 5);
  REQUIRE(p.cells() % 2 == 1);
  const int M = p.center();
  CHECK(p.cell_mid(M) == Catch::Approx(0.0).margin(1e-15));
  CHECK(p.grid.front() == Catch::Approx(-p.grid.back()).margin(1e-12));
  // deterministic part telescopes to -4 t^3 exactly
  double acc = 0;
  for (int j = M + 1; j < p.cells(); ++j) {
    const double t0 = p.grid[j], t1 = p.grid[j + 1];
    acc += p.dx[j] - p.dw[j]; // sigma = 1
    CHECK(p.dx[j] - p.dw[j] == Catch::Approx(-4 * (t1 * t1 * t1 - t0 * t0 * t0)).margin(1e-12));
  }
  const double t_end = p.grid.back(), t_start = p.grid[M + 1];
  CHECK(acc == Catch::Approx(-4 * (t_end * t_end * t_end - t_start * t_start * t_start))
                   .margin(1e-10));
  // determinism
  DriverPath q = simulate_driver(2.0, 0.01, 5);
  REQUIRE(p.dx == q.dx);
}

TEST_CASE("Brownian moments over many seeds", "[limit]") {
  // variance of W(1) and the moments of int_0^1 W
  const int reps = 10000;
  double sw = 0, sww = 0, si = 0, sii = 0;
  for (int rep = 0; rep < reps; ++rep) {
    DriverPath p = simulate_driver(1.0, 0.01, 1000 + rep);
    auto w = p.w_edges();
    // edge closest to t = 1
    int k1 = 0;
    for (std::size_t k = 0; k < p.grid.size(); ++k)
      if (std::abs(p.grid[k] - 1.0) < std::abs(p.grid[k1] - 1.0)) k1 = static_cast<int>(k);
    const double w1 = w[k1];
    sw += w1;
    sww += w1 * w1;
    // trapezoid of W over [0, 1]
    double integral = 0;
    const int M = p.center();
    for (int k = M + 1; k < k1; ++k)
      integral += 0.5 * (w[k] + w[k + 1]) * p.delta;
    integral += 0.5 * w[M + 1] * (p.delta / 2); // the half cell [0, delta/2]
    si += integral;
    sii += integral * integral;
  }
  const double var_w1 = sww / reps - (sw / reps) * (sw / reps);
  const double var_int = sii / reps - (si / reps) * (si / reps);
  CHECK(var_w1 == Catch::Approx(1.0).epsilon(0.05));
  CHECK(si / reps == Catch::Approx(0.0).margin(0.02));
  CHECK(var_int == Catch::Approx(1.0 / 3).epsilon(0.05));
}

TEST_CASE("zero-noise path projects to itself", "[limit]") {
  DriverPath p = zero_noise(3.0, 0.01);
  LimitFit f = invelope_unconstrained(p);
  REQUIRE(f.converged);
  double resid = 0;
  for (int j = 0; j < p.cells(); ++j) {
    const double y = p.dx[j] / p.delta;
    resid += (f.g[j] - y) * (f.g[j] - y);
  }
  CHECK(resid <= 1e-16);
  CHECK(limit_value_at(p, f, 0.0) == Catch::Approx(-0.01 * 0.01).margin(1e-10));
  CHECK(limit_value_at(p, f, 1.0) == Catch::Approx(-12.0).margin(1e-3));

  LimitFit fc = invelope_constrained(p);
  REQUIRE(fc.converged);
  double residc = 0;
  for (int j = 0; j < p.cells(); ++j) {
    const double y = p.dx[j] / p.delta;
    residc += (fc.g[j] - y) * (fc.g[j] - y);
  }
  CHECK(residc <= 1e-16);
}

TEST_CASE("objective beats a concave-majorant heuristic", "[limit]") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    DriverPath p = simulate_driver(3.0, 0.01, seed);
    LimitFit f = invelope_unconstrained(p);
    REQUIRE(f.converged);
    // heuristic feasible competitor: upper hull of the raw cell data
    const int J = p.cells();
    std::vector<double> y(J);
    for (int j = 0; j < J; ++j) y[j] = p.dx[j] / p.delta;
    std::vector<int> hull;
    for (int i = 0; i < J; ++i) {
      while (hull.size() >= 2) {
        const int a = hull[hull.size() - 2], b = hull.back();
        const double cross = (b - a) * (y[i] - y[a]) - (i - a) * (y[b] - y[a]);
        if (cross >= 0) hull.pop_back();
        else break;
      }
      hull.push_back(i);
    }
    std::vector<double> h(J);
    for (std::size_t q = 0; q + 1 < hull.size(); ++q) {
      const int a = hull[q], b = hull[q + 1];
      for (int i = a; i <= b; ++i) {
        const double t = static_cast<double>(i - a) / (b - a);
        h[i] = (1 - t) * y[a] + t * y[b];
      }
    }
    double obj_h = 0;
    for (int j = 0; j < J; ++j)
      obj_h += 0.5 * h[j] * h[j] * p.delta - h[j] * p.dx[j];
    CHECK(f.objective <= obj_h + 1e-9);
    // smaller feasible set for a minimization
    LimitFit fc = invelope_constrained(p);
    CHECK(fc.objective >= f.objective - 1e-9);
  }
}

TEST_CASE("discrete KKT certificates hold exactly", "[limit]") {
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL, 14ULL}) {
    DriverPath p = simulate_driver(4.0, 0.005, seed);
    LimitFit f = invelope_unconstrained(p);
    REQUIRE(f.converged);
    CHECK(f.max_hy_violation <= 1e-9 * f.scale);
    CHECK(f.worst_touch_gap <= 1e-8 * f.scale);
    CHECK(f.full_window_balance <= 1e-10 * f.scale);
    CHECK(!f.kinks.empty());

    LimitFit fc = invelope_constrained(p);
    REQUIRE(fc.converged);
    CHECK(fc.max_hy_violation <= 1e-9 * fc.scale);
    CHECK(fc.worst_touch_gap <= 1e-8 * fc.scale);
    CHECK(fc.full_window_balance <= 1e-10 * fc.scale);
    // zero slope on the modal interval, mode cone at the centre
    CHECK(fc.modal_max_slope <= 1e-10);
    const int M = p.center();
    CHECK((fc.g[M] - fc.g[M - 1]) / p.delta >= -1e-12);
    CHECK((fc.g[M + 1] - fc.g[M]) / p.delta <= 1e-12);
    CHECK(fc.mid_condition_residual >= 0);
    INFO("mid-condition residual " << fc.mid_condition_residual << " at scale "
                                   << fc.scale);
  }
}

TEST_CASE("limit constants", "[limit]") {
  auto c1 = limit_constants(1.0, -24.0);
  CHECK(c1.c_f == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(c1.C_phi == Catch::Approx(1.0).epsilon(1e-14));
  const double f0 = 1.0 / std::sqrt(2 * M_PI);
  auto cn = limit_constants(f0, -1.0);
  CHECK(cn.C_phi == Catch::Approx(std::pow(2 * M_PI / 24.0, 0.2)).epsilon(1e-14));
  CHECK(cn.C_phi == Catch::Approx(0.764880739958446).epsilon(1e-12));
  // curvature * 2^5 multiplies D_phi by 2^3
  auto a = limit_constants(0.37, -1.0);
  auto b = limit_constants(0.37, -32.0);
  CHECK(b.D_phi == Catch::Approx(8.0 * a.D_phi).epsilon(1e-12));
  CHECK_THROWS_AS(limit_constants(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(limit_constants(-0.5, -1.0), std::invalid_argument);
}

TEST_CASE("one-sided slopes at the mode are cone-feasible", "[limit]") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    DriverPath p = simulate_driver(3.0, 0.01, seed);
    LimitFit fc = invelope_constrained(p);
    const int M = p.center();
    CHECK((fc.g[M] - fc.g[M - 1]) >= -1e-12);
    CHECK((fc.g[M + 1] - fc.g[M]) <= 1e-12);
  }
}

TEST_CASE("bridge refinement is consistent and stable at zero", "[limit]") {
  for (std::uint64_t seed : {21ULL, 22ULL}) {
    DriverPath p = simulate_driver(3.0, 0.01, seed);
    DriverPath q = refine_half(p, 777);
    REQUIRE(q.cells() == 2 * p.cells());
    // refined increments resum to the coarse ones exactly
    for (int j = 0; j < p.cells(); ++j)
      REQUIRE(p.dw[j] == Catch::Approx(q.dw[2 * j] + q.dw[2 * j + 1]).margin(1e-14));
    LimitFit f = invelope_unconstrained(p);
    LimitFit g = invelope_unconstrained(q);
    const double at0_coarse = limit_value_at(p, f, 0.0);
    const double at0_fine = limit_value_at(q, g, 0.0);
    CHECK(std::abs(at0_coarse - at0_fine) <= 0.1);
  }
}
