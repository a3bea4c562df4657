#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "logcave/certificate.hpp"
#include "logcave/densities.hpp"
#include "logcave/metrics.hpp"
#include "logcave/parallel.hpp"
#include "logcave/processes.hpp"
#include "logcave/solver.hpp"

namespace logcave {

enum class RateMetric { hellinger, supnorm_K, knot_gap, near_mode_diff };

inline const char* rate_metric_name(RateMetric m) {
  switch (m) {
    case RateMetric::hellinger: return "hellinger";
    case RateMetric::supnorm_K: return "supnorm";
    case RateMetric::knot_gap: return "knot-gap";
    case RateMetric::near_mode_diff: return "near-mode";
  }
  return "?";
}

struct RateReport {
  RateMetric metric;
  std::vector<long> n_grid;
  int replications = 0;
  std::vector<double> median_errors;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double slope_ci_halfwidth = std::numeric_limits<double>::quiet_NaN();
  long skipped = 0;
};

namespace detail {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return (k % 2) ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

/// tau_+ and tau_- around m in the S_n sense (kinks plus endpoints).
inline std::pair<double, double> knot_gap_around(const PwlConcave& f, double m) {
  double below = f.domain_lo(), above = f.domain_hi();
  for (double t : f.knot_set_abscissae()) {
    if (t < m && t > below) below = t;
    if (t > m && t < above) above = t;
  }
  return {below, above};
}

} // namespace detail

/// One replication of a rate metric; throws FitNonConvergence through.
inline double rate_metric_value(const TrueDensity& d, RateMetric metric,
                                const SortedSample& s, bool constrained,
                                const SolverOptions& opts) {
  switch (metric) {
    case RateMetric::hellinger: {
      Fit f = constrained ? fit_constrained(s, d.mode, opts) : fit_unconstrained(s, opts);
      return hellinger(f.estimate, d);
    }
    case RateMetric::supnorm_K: {
      Fit f = constrained ? fit_constrained(s, d.mode, opts) : fit_unconstrained(s, opts);
      const double lo = d.quantile(0.25), hi = d.quantile(0.75);
      return supnorm_density(f.estimate, d, lo, hi);
    }
    case RateMetric::knot_gap: {
      Fit f = constrained ? fit_constrained(s, d.mode, opts) : fit_unconstrained(s, opts);
      auto [below, above] = detail::knot_gap_around(f.estimate, d.mode);
      return above - below;
    }
    case RateMetric::near_mode_diff: {
      Fit fu = fit_unconstrained(s, opts);
      Fit fc = fit_constrained(s, d.mode, opts);
      const double h = std::pow(static_cast<double>(s.n_raw), -0.2);
      const double lo = std::max(d.mode - h, s.min());
      const double hi = std::min(d.mode + h, s.max());
      return supnorm_pwl_pair(fu.estimate, fc.estimate, lo, hi);
    }
  }
  return 0;
}

/// Monte Carlo rate experiment: per (n, rep) draw, fit, evaluate; aggregate
/// medians and the OLS slope of log median error against log n.
/// Replications own RNG substreams mix_seed(seed, n, rep) and run in
/// parallel; more than 1% non-convergent replications fails the run.
inline RateReport rate_experiment(const TrueDensity& d, RateMetric metric,
                                  const std::vector<long>& n_grid, int reps,
                                  std::uint64_t seed, bool constrained,
                                  const SolverOptions& opts = SolverOptions{}) {
  if (n_grid.empty() || reps < 1) throw std::invalid_argument("empty rate design");
  RateReport rep;
  rep.metric = metric;
  rep.n_grid = n_grid;
  rep.replications = reps;

  const std::size_t total = n_grid.size() * static_cast<std::size_t>(reps);
  std::vector<double> vals(total, std::numeric_limits<double>::quiet_NaN());
  std::atomic<long> skipped{0};
  parallel_for(total, [&](std::size_t idx) {
    const std::size_t ni = idx / reps;
    const int r = static_cast<int>(idx % reps);
    const long n = n_grid[ni];
    const SortedSample s = sample_density(d, n, mix_seed(seed, n, r));
    try {
      vals[idx] = rate_metric_value(d, metric, s, constrained, opts);
    } catch (const NonConvergenceError&) {
      skipped.fetch_add(1);
    }
  });
  rep.skipped = skipped.load();
  if (rep.skipped * 100 > static_cast<long>(total))
    throw std::runtime_error("more than 1% of replications failed to converge");

  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    std::vector<double> col;
    for (int r = 0; r < reps; ++r) {
      const double v = vals[ni * reps + r];
      if (std::isfinite(v)) col.push_back(v);
    }
    rep.median_errors.push_back(detail::median_of(std::move(col)));
  }

  const std::size_t k = n_grid.size();
  if (k >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const double x = std::log(static_cast<double>(n_grid[i]));
      const double y = std::log(rep.median_errors[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(k);
    const double vxx = sxx - sx * sx / n;
    rep.slope = (sxy - sx * sy / n) / vxx;
    if (k >= 3) {
      double rss = 0;
      const double b0 = (sy - rep.slope * sx) / n;
      for (std::size_t i = 0; i < k; ++i) {
        const double x = std::log(static_cast<double>(n_grid[i]));
        const double y = std::log(rep.median_errors[i]);
        const double e = y - b0 - rep.slope * x;
        rss += e * e;
      }
      rep.slope_ci_halfwidth = 1.96 * std::sqrt(rss / (n - 2) / vxx);
    }
  }
  return rep;
}

// ---- figure panels -------------------------------------------------------

/// Plot data for one scenario: densities, log-densities, CDFs, the
/// characterization difference processes for both estimators, and knot
/// markers, on a 512-point grid over the mode-augmented range.
struct PanelTable {
  std::vector<double> x;
  std::vector<double> f_true, logf_true, F_true; // NaN when no truth given
  std::vector<double> f_unc, logf_unc, F_unc;
  std::vector<double> f_con, logf_con, F_con;
  std::vector<double> F_emp;
  std::vector<double> y_minus_h_unc;   // unconstrained Y - H
  std::vector<double> yl_minus_hl;     // constrained left system
  std::vector<double> yr_minus_hr;     // constrained right system
  std::vector<int> knot_unc, knot_con; // 1 if a knot falls in the grid cell
  double worst_negativity = 0;         // most negative difference seen
  double worst_knot_gap = 0;           // largest |difference| at a knot
  Fit unconstrained_fit;
  Fit constrained_fit;
};

inline PanelTable figure_panels(const SortedSample& s, double m,
                                const SolverOptions& opts = SolverOptions{},
                                const TrueDensity* truth = nullptr) {
  Fit fu = fit_unconstrained(s, opts);
  Fit fc = fit_constrained(s, m, opts);
  const double x1 = s.min(), xn = s.max();
  EmpiricalProcesses emp(s);
  FittedProcesses pu(fu.estimate, x1, xn);
  FittedProcesses pc(fc.estimate, x1, xn);

  PanelTable t{.unconstrained_fit = fu, .constrained_fit = fc};
  const double lo = fc.estimate.domain_lo(), hi = fc.estimate.domain_hi();
  const int G = 512;
  t.x.resize(G);
  for (int k = 0; k < G; ++k) t.x[k] = lo + (hi - lo) * k / (G - 1.0);

  auto fill = [&](std::vector<double>& col, auto&& fn) {
    col.resize(G);
    for (int k = 0; k < G; ++k) col[k] = fn(t.x[k]);
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  fill(t.f_true, [&](double x) { return truth ? truth->density(x) : nan; });
  fill(t.logf_true, [&](double x) { return truth ? truth->log_density(x) : nan; });
  fill(t.F_true, [&](double x) { return truth ? truth->cdf(x) : nan; });
  fill(t.f_unc, [&](double x) { return fu.estimate.density(x); });
  fill(t.logf_unc, [&](double x) { return fu.estimate.value(x); });
  fill(t.F_unc, [&](double x) { return fu.estimate.cdf(x); });
  fill(t.f_con, [&](double x) { return fc.estimate.density(x); });
  fill(t.logf_con, [&](double x) { return fc.estimate.value(x); });
  fill(t.F_con, [&](double x) { return fc.estimate.cdf(x); });
  fill(t.F_emp, [&](double x) { return s.ecdf(x); });
  auto clamp = [&](double x) { return std::clamp(x, x1, xn); };
  fill(t.y_minus_h_unc, [&](double x) { return emp.yl(clamp(x)) - pu.hl(clamp(x)); });
  fill(t.yl_minus_hl, [&](double x) { return emp.yl(clamp(x)) - pc.hl(clamp(x)); });
  fill(t.yr_minus_hr, [&](double x) { return emp.yr(clamp(x)) - pc.hr(clamp(x)); });

  t.knot_unc.assign(G, 0);
  t.knot_con.assign(G, 0);
  const double cell = (hi - lo) / (G - 1.0);
  auto mark = [&](std::vector<int>& col, const std::vector<double>& knots) {
    for (double k : knots) {
      const int idx = std::clamp(static_cast<int>(std::round((k - lo) / cell)), 0, G - 1);
      col[idx] = 1;
    }
  };
  mark(t.knot_unc, fu.estimate.knot_set_abscissae());
  mark(t.knot_con, fc.estimate.knot_set_abscissae());

  // re-assert the characterization on the emitted data; each constrained
  // system is only required to be nonnegative on its own side of m
  for (int k = 0; k < G; ++k) {
    t.worst_negativity = std::min(t.worst_negativity, t.y_minus_h_unc[k]);
    if (t.x[k] <= m) t.worst_negativity = std::min(t.worst_negativity, t.yl_minus_hl[k]);
    if (t.x[k] >= m) t.worst_negativity = std::min(t.worst_negativity, t.yr_minus_hr[k]);
  }
  for (double kx : fu.estimate.knot_set_abscissae())
    t.worst_knot_gap = std::max(t.worst_knot_gap,
                                std::abs(emp.yl(clamp(kx)) - pu.hl(clamp(kx))));
  const KnotClass kc = fc.estimate.knot_class(m);
  for (double kx : fc.estimate.knot_set_abscissae()) {
    const double mtol = 1e-9 * (1 + std::abs(m));
    if (std::abs(kx - m) <= mtol) {
      if (kc == KnotClass::LK || kc == KnotClass::BOTH)
        t.worst_knot_gap =
            std::max(t.worst_knot_gap, std::abs(emp.yl(clamp(kx)) - pc.hl(clamp(kx))));
      if (kc == KnotClass::RK || kc == KnotClass::BOTH)
        t.worst_knot_gap =
            std::max(t.worst_knot_gap, std::abs(emp.yr(clamp(kx)) - pc.hr(clamp(kx))));
    } else if (kx < m) {
      t.worst_knot_gap =
          std::max(t.worst_knot_gap, std::abs(emp.yl(clamp(kx)) - pc.hl(clamp(kx))));
    } else {
      t.worst_knot_gap =
          std::max(t.worst_knot_gap, std::abs(emp.yr(clamp(kx)) - pc.hr(clamp(kx))));
    }
  }
  if (t.worst_negativity < -1e-8 || t.worst_knot_gap > 1e-8)
    throw std::logic_error("emitted difference processes violate the characterization");
  return t;
}

} // namespace logcave
