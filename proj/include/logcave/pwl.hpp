#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "logcave/errors.hpp"
#include "logcave/exp_kernels.hpp"

namespace logcave {

enum class KnotClass { LK, RK, NK, BOTH };

/// Piecewise-linear concave function phi: knot abscissae + values, -inf off
/// the domain [knots.front(), knots.back()].  Immutable after construction;
/// prefix integrals of e^phi and of its CDF are cached for O(log K) queries.
class PwlConcave {
public:
  /// Relative tolerance for the concavity check on successive slopes.
  static constexpr double kConcavityTol = 1e-10;
  /// A grid point is a genuine kink when the slope change exceeds
  /// 1e-9 * (1 + |slope|); must match the solver's concavity tolerance.
  static constexpr double kKinkTol = 1e-9;

  PwlConcave(std::vector<double> knots, std::vector<double> values)
      : knots_(std::move(knots)), values_(std::move(values)) {
    validate();
    build_prefix();
  }

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t segments() const { return knots_.size() - 1; }
  double domain_lo() const { return knots_.front(); }
  double domain_hi() const { return knots_.back(); }

  double value(double x) const {
    if (x < knots_.front() || x > knots_.back())
      return -std::numeric_limits<double>::infinity();
    const std::size_t i = segment_of(x);
    const double t = (x - knots_[i]) / (knots_[i + 1] - knots_[i]);
    return (1 - t) * values_[i] + t * values_[i + 1];
  }

  double density(double x) const {
    const double v = value(x);
    return std::isfinite(v) ? std::exp(v) : 0.0;
  }

  double slope(std::size_t seg) const {
    return (values_[seg + 1] - values_[seg]) / (knots_[seg + 1] - knots_[seg]);
  }

  /// One-sided slopes at x (equal when x is interior to a segment).
  /// x must lie in the domain.
  std::pair<double, double> slopes_at(double x) const {
    if (x < knots_.front() || x > knots_.back())
      throw DomainMismatchError("point outside the function domain");
    const double tol = 1e-12 * (1.0 + std::abs(x));
    // locate a knot coinciding with x, if any
    auto it = std::lower_bound(knots_.begin(), knots_.end(), x - tol);
    const std::size_t j = static_cast<std::size_t>(it - knots_.begin());
    if (j < knots_.size() && std::abs(knots_[j] - x) <= tol) {
      const double sl = (j == 0) ? slope(0) : slope(j - 1);
      const double sr = (j + 1 == knots_.size()) ? slope(j - 1) : slope(j);
      return {sl, sr};
    }
    const std::size_t i = segment_of(x);
    return {slope(i), slope(i)};
  }

  double exp_integral() const { return cum_exp_.back(); }

  /// int_{-inf}^{t} e^phi = int_{knots[0]}^{t} e^phi for t in the domain.
  double cdf(double t) const {
    if (t <= knots_.front()) return 0.0;
    if (t >= knots_.back()) return cum_exp_.back();
    const std::size_t i = segment_of(t);
    const double dt = t - knots_[i];
    return cum_exp_[i] + dt * j00(values_[i], value(t));
  }

  /// G(t) = int_{knots[0]}^{t} cdf(x) dx, the second integral of the density.
  double int_cdf(double t) const {
    if (t <= knots_.front()) return 0.0;
    double tt = std::min(t, knots_.back());
    const std::size_t i = (tt >= knots_.back()) ? segments() - 1 : segment_of(tt);
    const double dt = tt - knots_[i];
    double g = cum_intF_[i] + dt * cum_exp_[i] + dt * dt * j10(values_[i], value(tt));
    if (t > knots_.back()) g += (t - knots_.back()) * cum_exp_.back();
    return g;
  }

  /// Exact first two moments of the density e^phi / int e^phi.
  std::pair<double, double> mean_var() const {
    const double m0 = exp_integral();
    const double a = knots_.front();
    double m1 = 0;
    for (std::size_t i = 0; i < segments(); ++i) {
      const double dx = knots_[i + 1] - knots_[i];
      m1 += dx * ((knots_[i] - a) * j00(values_[i], values_[i + 1]) +
                  dx * j01(values_[i], values_[i + 1]));
    }
    const double mean = a + m1 / m0;
    double m2 = 0;
    for (std::size_t i = 0; i < segments(); ++i) {
      const double dx = knots_[i + 1] - knots_[i];
      const double c = knots_[i] - mean;
      m2 += dx * (c * c * j00(values_[i], values_[i + 1]) +
                  2.0 * c * dx * j01(values_[i], values_[i + 1]) +
                  dx * dx * j02(values_[i], values_[i + 1]));
    }
    return {mean, m2 / m0};
  }

  /// Smallest slope difference at interior knot i that is distinguishable
  /// from zero in double precision (value rounding divided by the spacings).
  double slope_noise_floor(std::size_t i) const {
    const double vmax = std::max(
        {std::abs(values_[i - 1]), std::abs(values_[i]), std::abs(values_[i + 1])});
    return 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + vmax) *
           (1.0 / (knots_[i] - knots_[i - 1]) + 1.0 / (knots_[i + 1] - knots_[i]));
  }

  /// Indices of interior knots where the function genuinely kinks.
  std::vector<std::size_t> kink_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < knots_.size(); ++i) {
      const double sl = slope(i - 1), sr = slope(i);
      if (sl - sr > kKinkTol * (1.0 + std::max(std::abs(sl), std::abs(sr))) +
                        slope_noise_floor(i))
        out.push_back(i);
    }
    return out;
  }

  /// Knot abscissae in the S_n sense: genuine interior kinks plus endpoints.
  std::vector<double> knot_set_abscissae() const {
    std::vector<double> out{knots_.front()};
    for (std::size_t i : kink_indices()) out.push_back(knots_[i]);
    out.push_back(knots_.back());
    return out;
  }

  /// Classify a candidate mode m against the one-sided slopes there.  At a
  /// domain endpoint the off-domain side drops to -inf, so that one-sided
  /// slope counts as +inf (left) resp. -inf (right).
  /// Throws ModeInfeasibleError when the mode cone is violated beyond tol.
  KnotClass knot_class(double m, double tol = 1e-8) const {
    auto [sl, sr] = slopes_at(m);
    const double etol = 1e-12 * (1.0 + std::abs(m));
    if (std::abs(m - knots_.front()) <= etol)
      sl = std::numeric_limits<double>::infinity();
    if (std::abs(m - knots_.back()) <= etol)
      sr = -std::numeric_limits<double>::infinity();
    const double scale =
        1.0 + std::max(std::isfinite(sl) ? std::abs(sl) : 0.0,
                       std::isfinite(sr) ? std::abs(sr) : 0.0);
    if (sl < -tol * scale || sr > tol * scale)
      throw ModeInfeasibleError("function does not attain its maximum at m");
    const bool lpos = sl > tol * scale;
    const bool rneg = sr < -tol * scale;
    if (lpos && rneg) return KnotClass::BOTH;
    if (lpos) return KnotClass::LK;
    if (rneg) return KnotClass::RK;
    return KnotClass::NK;
  }

  /// Shift values so the density integrates to one.
  PwlConcave normalized() const {
    const double c = std::log(exp_integral());
    std::vector<double> v = values_;
    for (double& x : v) x -= c;
    return PwlConcave(knots_, std::move(v));
  }

private:
  std::vector<double> knots_, values_;
  std::vector<double> cum_exp_;  // int e^phi up to each knot
  std::vector<double> cum_intF_; // int of cdf up to each knot

  std::size_t segment_of(double x) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - knots_.begin());
    if (i == 0) return 0;
    if (i >= knots_.size()) return knots_.size() - 2;
    return i - 1;
  }

  void validate() const {
    if (knots_.size() < 2 || knots_.size() != values_.size())
      throw std::invalid_argument("PwlConcave needs K+1 >= 2 knots and values");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      if (!std::isfinite(knots_[i]) || !std::isfinite(values_[i]))
        throw std::invalid_argument("PwlConcave entries must be finite");
      if (i > 0 && !(knots_[i] > knots_[i - 1]))
        throw std::invalid_argument("knots must be strictly increasing");
    }
    for (std::size_t i = 0; i + 2 < knots_.size(); ++i) {
      const double s0 = slope(i), s1 = slope(i + 1);
      const double scale = std::max({1.0, std::abs(s0), std::abs(s1)});
      if (s1 - s0 > kConcavityTol * scale + slope_noise_floor(i + 1))
        throw std::invalid_argument("values are not concave over the knots");
    }
  }

  void build_prefix() {
    const std::size_t n = knots_.size();
    cum_exp_.assign(n, 0.0);
    cum_intF_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double dx = knots_[i + 1] - knots_[i];
      cum_exp_[i + 1] = cum_exp_[i] + dx * j00(values_[i], values_[i + 1]);
      cum_intF_[i + 1] =
          cum_intF_[i] + dx * cum_exp_[i] + dx * dx * j10(values_[i], values_[i + 1]);
    }
  }
};

/// Sup-norm distance of two piecewise-linear functions over the intersection
/// of their domains (the difference is piecewise linear, so the breakpoints
/// suffice).
inline double sup_distance(const PwlConcave& a, const PwlConcave& b) {
  const double lo = std::max(a.domain_lo(), b.domain_lo());
  const double hi = std::min(a.domain_hi(), b.domain_hi());
  if (!(hi > lo)) throw DomainMismatchError("disjoint domains");
  std::vector<double> xs{lo, hi};
  for (double x : a.knots())
    if (x > lo && x < hi) xs.push_back(x);
  for (double x : b.knots())
    if (x > lo && x < hi) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  double d = 0;
  for (double x : xs) d = std::max(d, std::abs(a.value(x) - b.value(x)));
  return d;
}

} // namespace logcave
