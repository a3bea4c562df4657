#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "logcave/errors.hpp"
#include "logcave/pwl.hpp"
#include "logcave/sample.hpp"

namespace logcave {

/// Integrated empirical processes of a weighted sample:
///   F_{n,L}(t) = F_n(t) (right continuous),
///   F_{n,R}(t) = integral over [t, inf) of dF_n (closed left endpoint),
///   Y_{n,L}(t) = int_{X_(1)}^t F_{n,L},  Y_{n,R}(t) = int_t^{X_(n)} F_{n,R}.
/// All are piecewise linear/constant with breakpoints at the data, so the
/// prefix sums below make every query exact.
class EmpiricalProcesses {
public:
  explicit EmpiricalProcesses(const SortedSample& s) : s_(&s) {
    const std::size_t n = s.points.size();
    cumw_.assign(n, 0.0);
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += s.weights[i];
      cumw_[i] = acc;
    }
    yl_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
      yl_[i + 1] = yl_[i] + cumw_[i] * (s.points[i + 1] - s.points[i]);
    yr_.assign(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;)
      yr_[i] = yr_[i + 1] + (1.0 - cumw_[i]) * (s.points[i + 1] - s.points[i]);
  }

  double fnl(double t) const { return s_->ecdf(t); }

  /// Closed-left tail sum: weight of {X_j >= t}.  At a data point this
  /// includes the point's own weight, so it differs from 1 - F_n(t) there.
  double fnr(double t) const {
    const auto& x = s_->points;
    auto it = std::lower_bound(x.begin(), x.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    return (i == 0) ? 1.0 : 1.0 - cumw_[i - 1];
  }

  double yl(double t) const {
    const auto& x = s_->points;
    if (t <= x.front()) return 0.0;
    if (t >= x.back()) return yl_.back() + (t - x.back());
    const std::size_t i = seg(t);
    return yl_[i] + cumw_[i] * (t - x[i]);
  }

  double yr(double t) const {
    const auto& x = s_->points;
    if (t >= x.back()) return 0.0;
    if (t <= x.front()) return yr_.front() + (x.front() - t);
    const std::size_t i = seg(t);
    return yr_[i + 1] + (1.0 - cumw_[i]) * (x[i + 1] - t);
  }

  double yl_at_index(std::size_t i) const { return yl_[i]; }
  double yr_at_index(std::size_t i) const { return yr_[i]; }
  double cumw(std::size_t i) const { return cumw_[i]; }

private:
  const SortedSample* s_;
  std::vector<double> cumw_, yl_, yr_;

  std::size_t seg(double t) const {
    const auto& x = s_->points;
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    if (i == 0) return 0;
    if (i >= x.size()) return x.size() - 2;
    return i - 1;
  }
};

/// Integrated processes of a fitted density, anchored to the sample range:
///   Fhat_L(t) = int_{-inf}^t e^phi,   Fhat_R(t) = int_t^{X_(n)} e^phi,
///   Hhat_L(t) = int_{X_(1)}^t Fhat_L, Hhat_R(t) = int_t^{X_(n)} Fhat_R.
/// The fit's domain may extend beyond [X_(1), X_(n)] when the mode does.
class FittedProcesses {
public:
  FittedProcesses(const PwlConcave& f, double x1, double xn)
      : f_(&f), x1_(x1), xn_(xn) {
    g_x1_ = f.int_cdf(x1);
    g_xn_ = f.int_cdf(xn);
    f_xn_ = f.cdf(xn);
  }

  double fl(double t) const { return f_->cdf(t); }
  double fr(double t) const { return f_xn_ - f_->cdf(t); }
  double hl(double t) const { return f_->int_cdf(t) - g_x1_; }
  double hr(double t) const {
    return f_xn_ * (xn_ - t) - (g_xn_ - f_->int_cdf(t));
  }

private:
  const PwlConcave* f_;
  double x1_, xn_, g_x1_, g_xn_, f_xn_;
};

struct LrProcessRow {
  double t;
  double y_nl, y_nr; // integrated empirical processes
  double h0l, h0r;   // integrated fitted processes
};

/// Evaluate the four integrated processes at the requested abscissae.
/// The processes do not depend on m; it is accepted for interface symmetry
/// with the constrained-characterization callers.
inline std::vector<LrProcessRow> lr_processes(const PwlConcave& f,
                                              const SortedSample& s, double m,
                                              const std::vector<double>& eval_at) {
  s.validate();
  if (!std::isfinite(m)) throw std::invalid_argument("mode must be finite");
  const double lo = s.min(), hi = s.max();
  const double tol = 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
  EmpiricalProcesses emp(s);
  FittedProcesses fit(f, lo, hi);
  std::vector<LrProcessRow> out;
  out.reserve(eval_at.size());
  for (double t : eval_at) {
    if (t < lo - tol || t > hi + tol)
      throw std::invalid_argument("evaluation point outside the data range");
    const double tc = std::clamp(t, lo, hi);
    out.push_back({t, emp.yl(tc), emp.yr(tc), fit.hl(tc), fit.hr(tc)});
  }
  return out;
}

} // namespace logcave
