#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "logcave/errors.hpp"
#include "logcave/processes.hpp"
#include "logcave/pwl.hpp"
#include "logcave/sample.hpp"

namespace logcave {

/// Worst-case residuals of the characterization systems, computed without
/// trusting the solver.
struct CharacterizationReport {
  double max_inequality_violation = 0; // worst positive excess of Hhat over Y
  double max_knot_equality_gap = 0;    // worst |Hhat - Y| at required knots
  double touching_violation = 0;       // worst excess outside the F_n band
  double normalization_gap = 0;        // |int e^phi - 1|
  bool pass = false;

  double worst() const {
    return std::max({max_inequality_violation, max_knot_equality_gap,
                     touching_violation, normalization_gap});
  }
};

namespace detail {

/// Between consecutive breakpoints Hhat - Y is smooth; sample 64 Chebyshev
/// points plus the endpoints.  (The difference is in fact convex there, so
/// the endpoints alone would do; the dense scan keeps the certificate
/// independent of that argument.)
constexpr int kChebPoints = 64;

template <typename F>
void scan_interval(double a, double b, F&& eval) {
  eval(a);
  for (int k = 1; k <= kChebPoints; ++k) {
    const double c = std::cos((2.0 * k - 1.0) * M_PI / (2.0 * kChebPoints));
    eval(0.5 * (a + b) + 0.5 * (b - a) * c);
  }
  eval(b);
}

inline std::vector<double> merged_breakpoints(const std::vector<double>& a,
                                              const std::vector<double>& b,
                                              double lo, double hi) {
  std::vector<double> xs;
  xs.push_back(lo);
  xs.push_back(hi);
  for (double x : a)
    if (x > lo && x < hi) xs.push_back(x);
  for (double x : b)
    if (x > lo && x < hi) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](double u, double v) {
                         return std::abs(u - v) <= 1e-12 * (1 + std::abs(u));
                       }),
           xs.end());
  return xs;
}

/// Touching bound at a knot: F_n(t) - w_t <= Fhat(t) <= F_n(t), where w_t is
/// the sample weight sitting exactly at t (1/n for untied data, 0 if t is not
/// a data point).
inline double touching_excess(const PwlConcave& f, const SortedSample& s, double t) {
  const double fn = s.ecdf(t);
  double wt = 0;
  auto it = std::lower_bound(s.points.begin(), s.points.end(),
                             t - 1e-9 * (1 + std::abs(t)));
  if (it != s.points.end() && std::abs(*it - t) <= 1e-9 * (1 + std::abs(t)))
    wt = s.weights[it - s.points.begin()];
  const double fh = f.cdf(t);
  return std::max({fh - fn, (fn - wt) - fh, 0.0});
}

} // namespace detail

/// Check a claimed unconstrained MLE against the finite-sample
/// characterization: Hhat(t) <= Y(t) on the data range with equality on the
/// knot set, the touching bounds at interior knots, and unit mass.
inline CharacterizationReport verify_unconstrained(const PwlConcave& f,
                                                   const SortedSample& s,
                                                   double tol) {
  s.validate();
  const double x1 = s.min(), xn = s.max();
  const double dtol = 1e-9 * (1 + std::max(std::abs(x1), std::abs(xn)));
  if (std::abs(f.domain_lo() - x1) > dtol || std::abs(f.domain_hi() - xn) > dtol)
    throw DomainMismatchError("fit domain must be the sample range");

  EmpiricalProcesses emp(s);
  FittedProcesses fit(f, x1, xn);
  CharacterizationReport rep;
  rep.normalization_gap = std::abs(f.exp_integral() - 1.0);

  const auto bps = detail::merged_breakpoints(s.points, f.knots(), x1, xn);
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    detail::scan_interval(bps[i], bps[i + 1], [&](double t) {
      const double d = fit.hl(t) - emp.yl(t);
      rep.max_inequality_violation = std::max(rep.max_inequality_violation, d);
    });
  }
  for (double t : f.knot_set_abscissae()) {
    const double tc = std::clamp(t, x1, xn);
    rep.max_knot_equality_gap =
        std::max(rep.max_knot_equality_gap, std::abs(fit.hl(tc) - emp.yl(tc)));
  }
  for (std::size_t i : f.kink_indices()) {
    const double t = f.knots()[i];
    if (t > x1 && t < xn)
      rep.touching_violation =
          std::max(rep.touching_violation, detail::touching_excess(f, s, t));
  }
  rep.pass = rep.worst() <= tol;
  return rep;
}

/// Check a claimed mode-constrained MLE: the left system on [X_(1), m], the
/// right system on [m, X_(n)], equalities at left/right knots per the LK/RK
/// classification of m, the touching bounds off m, and unit mass.
inline CharacterizationReport verify_constrained(const PwlConcave& f,
                                                 const SortedSample& s, double m,
                                                 double tol) {
  s.validate();
  if (!std::isfinite(m)) throw std::invalid_argument("mode must be finite");
  const double x1 = s.min(), xn = s.max();
  const double zlo = std::min(x1, m), zhi = std::max(xn, m);
  const double dtol = 1e-9 * (1 + std::max(std::abs(zlo), std::abs(zhi)));
  if (std::abs(f.domain_lo() - zlo) > dtol || std::abs(f.domain_hi() - zhi) > dtol)
    throw DomainMismatchError("fit domain must be the mode-augmented range");
  const KnotClass kc = f.knot_class(m); // throws ModeInfeasibleError if violated

  EmpiricalProcesses emp(s);
  FittedProcesses fit(f, x1, xn);
  CharacterizationReport rep;
  rep.normalization_gap = std::abs(f.exp_integral() - 1.0);

  const double mknot = 1e-9 * (1 + std::abs(m));
  const double lhi = std::min(m, xn); // left system range [x1, lhi]
  const double rlo = std::max(m, x1); // right system range [rlo, xn]

  if (lhi > x1) {
    std::vector<double> extra = f.knots();
    extra.push_back(m);
    const auto bps = detail::merged_breakpoints(s.points, extra, x1, lhi);
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
      detail::scan_interval(bps[i], bps[i + 1], [&](double t) {
        const double d = fit.hl(t) - emp.yl(t);
        rep.max_inequality_violation = std::max(rep.max_inequality_violation, d);
      });
    }
  }
  if (xn > rlo) {
    std::vector<double> extra = f.knots();
    extra.push_back(m);
    const auto bps = detail::merged_breakpoints(s.points, extra, rlo, xn);
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
      detail::scan_interval(bps[i], bps[i + 1], [&](double t) {
        const double d = fit.hr(t) - emp.yr(t);
        rep.max_inequality_violation = std::max(rep.max_inequality_violation, d);
      });
    }
  }

  // equalities at knots of the required type
  std::vector<double> lknots{x1}, rknots{xn};
  for (std::size_t i : f.kink_indices()) {
    const double t = f.knots()[i];
    if (std::abs(t - m) <= mknot) continue; // m handled via its class
    if (t < m && t > x1) lknots.push_back(t);
    if (t > m && t < xn) rknots.push_back(t);
  }
  if ((kc == KnotClass::LK || kc == KnotClass::BOTH) && m >= x1 && m <= xn)
    lknots.push_back(m);
  if ((kc == KnotClass::RK || kc == KnotClass::BOTH) && m >= x1 && m <= xn)
    rknots.push_back(m);
  for (double t : lknots)
    rep.max_knot_equality_gap =
        std::max(rep.max_knot_equality_gap, std::abs(fit.hl(t) - emp.yl(t)));
  for (double t : rknots)
    rep.max_knot_equality_gap =
        std::max(rep.max_knot_equality_gap, std::abs(fit.hr(t) - emp.yr(t)));

  // Cor-style touching on the knot set off m
  std::vector<double> tknots{f.domain_lo(), f.domain_hi()};
  for (std::size_t i : f.kink_indices()) tknots.push_back(f.knots()[i]);
  for (double t : tknots) {
    if (std::abs(t - m) <= mknot) continue;
    rep.touching_violation =
        std::max(rep.touching_violation, detail::touching_excess(f, s, t));
  }

  rep.pass = rep.worst() <= tol;
  return rep;
}

// ---- crossing diagnostics ----------------------------------------------------

enum class CrossingKind { CDF_EQUAL, DENSITY_EQUAL };

struct Crossing {
  double x;
  CrossingKind kind;
};

struct CrossingDiagnostics {
  bool degenerate = false; // fits coincide; every point is a root
  std::vector<Crossing> roots;
};

namespace detail {

template <typename G>
void find_sign_changes(G&& g, const std::vector<double>& bps, CrossingKind kind,
                       std::vector<Crossing>& out) {
  constexpr int kSub = 32;
  double xprev = bps.front();
  double gprev = g(xprev);
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    for (int k = 1; k <= kSub; ++k) {
      const double x = bps[i] + (bps[i + 1] - bps[i]) * k / kSub;
      const double gx = g(x);
      if ((gprev < 0 && gx > 0) || (gprev > 0 && gx < 0)) {
        double a = xprev, b = x, ga = gprev;
        while (b - a > 1e-10) {
          const double mid = 0.5 * (a + b);
          const double gm = g(mid);
          if ((ga < 0) == (gm < 0)) {
            a = mid;
            ga = gm;
          } else {
            b = mid;
          }
        }
        out.push_back({0.5 * (a + b), kind});
      }
      xprev = x;
      gprev = gx;
    }
  }
}

} // namespace detail

/// Locate sign changes of Fhat0 - Fhat and of fhat0 - fhat on the common
/// domain.  Returns the degenerate flag instead of a list when the two fits
/// coincide.
inline CrossingDiagnostics crossing_diagnostics(const PwlConcave& fu,
                                                const PwlConcave& fc,
                                                const SortedSample& s, double m) {
  s.validate();
  (void)m;
  CrossingDiagnostics diag;
  if (sup_distance(fu, fc) <= 1e-12) {
    diag.degenerate = true;
    return diag;
  }
  const double lo = std::max(fu.domain_lo(), fc.domain_lo());
  const double hi = std::min(fu.domain_hi(), fc.domain_hi());
  const auto bps = detail::merged_breakpoints(fu.knots(), fc.knots(), lo, hi);
  detail::find_sign_changes([&](double x) { return fc.cdf(x) - fu.cdf(x); }, bps,
                            CrossingKind::CDF_EQUAL, diag.roots);
  detail::find_sign_changes([&](double x) { return fc.density(x) - fu.density(x); },
                            bps, CrossingKind::DENSITY_EQUAL, diag.roots);
  std::sort(diag.roots.begin(), diag.roots.end(),
            [](const Crossing& a, const Crossing& b) { return a.x < b.x; });
  return diag;
}

} // namespace logcave
