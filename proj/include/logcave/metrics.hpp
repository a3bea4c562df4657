#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "logcave/densities.hpp"
#include "logcave/pwl.hpp"

namespace logcave {

namespace metrics_detail {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
    return left + right + (left + right - whole) / 15;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double adaptive(const std::function<double(double)>& f, double a, double b,
                       double tol) {
  if (!(b > a)) return 0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

} // namespace metrics_detail

/// Hellinger distance H(fhat, f0) = sqrt( (1/2) int (sqrt(p) - sqrt(q))^2 ).
/// Adaptive composite quadrature of the Bhattacharyya integral over the
/// union of the fit's knots and the truth's effective support.
inline double hellinger(const PwlConcave& f, const TrueDensity& d) {
  const double mass = f.exp_integral();
  if (std::abs(mass - 1.0) > 1e-6)
    throw std::invalid_argument("fit must be normalized within 1e-6");
  auto [slo, shi] = d.support(1e-16);
  const double lo = std::max(f.domain_lo(), slo);
  const double hi = std::min(f.domain_hi(), shi);
  std::vector<double> cuts{lo, hi};
  for (double x : f.knots())
    if (x > lo && x < hi) cuts.push_back(x);
  if (d.family == Family::custom_pwl)
    for (double x : d.pwl()->knots())
      if (x > lo && x < hi) cuts.push_back(x);
  if (d.family == Family::gamma_shape2 && 0 > lo && 0 < hi) cuts.push_back(0);
  std::sort(cuts.begin(), cuts.end());
  double bc = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    bc += metrics_detail::adaptive(
        [&](double x) { return std::sqrt(f.density(x) * d.density(x)); }, cuts[i],
        cuts[i + 1], 1e-12);
  const double h2 = std::max(0.0, 0.5 * mass + 0.5 - bc);
  return std::sqrt(std::min(1.0, h2));
}

/// sup |fhat - f0| over [lo, hi] at the fit's knots plus a dense grid.
inline double supnorm_density(const PwlConcave& f, const TrueDensity& d, double lo,
                              double hi) {
  double worst = 0;
  auto look = [&](double x) {
    worst = std::max(worst, std::abs(f.density(x) - d.density(x)));
  };
  for (double x : f.knots())
    if (x >= lo && x <= hi) look(x);
  for (int k = 0; k <= 512; ++k) look(lo + (hi - lo) * k / 512.0);
  return worst;
}

/// Exact sup of |a - b| over [lo, hi]: the difference is piecewise linear.
inline double supnorm_pwl_pair(const PwlConcave& a, const PwlConcave& b, double lo,
                               double hi) {
  std::vector<double> xs{lo, hi};
  for (double x : a.knots())
    if (x > lo && x < hi) xs.push_back(x);
  for (double x : b.knots())
    if (x > lo && x < hi) xs.push_back(x);
  double worst = 0;
  for (double x : xs) worst = std::max(worst, std::abs(a.value(x) - b.value(x)));
  return worst;
}

} // namespace logcave
