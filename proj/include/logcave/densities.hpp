#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

#include "logcave/pwl.hpp"
#include "logcave/rng.hpp"
#include "logcave/sample.hpp"

namespace logcave {

enum class Family { std_normal, gumbel, gamma_shape2, custom_pwl };

/// A known log-concave truth used by samplers, metrics, and rate laws.
/// curvature_at_mode is phi_0''(mode), needed by the pointwise limit
/// constants.
class TrueDensity {
public:
  Family family = Family::std_normal;
  double mode = 0;
  double curvature_at_mode = -1;

  static TrueDensity standard_normal() { return TrueDensity(Family::std_normal, 0, -1); }
  /// density e^{-(x + e^{-x})}
  static TrueDensity gumbel() { return TrueDensity(Family::gumbel, 0, -1); }
  /// density x e^{-x} on x >= 0
  static TrueDensity gamma_shape2() { return TrueDensity(Family::gamma_shape2, 1, -1); }

  static TrueDensity custom(PwlConcave f) {
    TrueDensity d(Family::custom_pwl, 0, std::numeric_limits<double>::quiet_NaN());
    d.pwl_ = f.normalized();
    double best = d.pwl_->values()[0];
    for (std::size_t i = 0; i < d.pwl_->knots().size(); ++i)
      if (d.pwl_->values()[i] >= best) {
        best = d.pwl_->values()[i];
        d.mode = d.pwl_->knots()[i];
      }
    return d;
  }

  double log_density(double x) const {
    switch (family) {
      case Family::std_normal:
        return -0.5 * x * x - 0.5 * std::log(2 * M_PI);
      case Family::gumbel:
        return -(x + std::exp(-x));
      case Family::gamma_shape2:
        return (x > 0) ? std::log(x) - x : -std::numeric_limits<double>::infinity();
      case Family::custom_pwl:
        return pwl_->value(x);
    }
    return 0;
  }

  double density(double x) const {
    const double l = log_density(x);
    return std::isfinite(l) ? std::exp(l) : 0.0;
  }

  double cdf(double x) const {
    switch (family) {
      case Family::std_normal:
        return norm_cdf(x);
      case Family::gumbel:
        return std::exp(-std::exp(-x));
      case Family::gamma_shape2:
        return (x > 0) ? -std::expm1(-x) - x * std::exp(-x) : 0.0;
      case Family::custom_pwl:
        return pwl_->cdf(x);
    }
    return 0;
  }

  double quantile(double p) const {
    if (!(p > 0 && p < 1)) throw std::invalid_argument("quantile needs p in (0,1)");
    switch (family) {
      case Family::std_normal:
        return norm_quantile(p);
      case Family::gumbel:
        return -std::log(-std::log(p));
      case Family::gamma_shape2: {
        double lo = 0, hi = 1;
        while (cdf(hi) < p) hi *= 2;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          (cdf(mid) < p ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
      }
      case Family::custom_pwl:
        return invert_pwl(p);
    }
    return 0;
  }

  double sample_one(Rng& rng) const {
    switch (family) {
      case Family::std_normal:
        return rng.normal();
      case Family::gumbel:
        return -std::log(-std::log(rng.uniform()));
      case Family::gamma_shape2:
        return rng.exponential() + rng.exponential();
      case Family::custom_pwl:
        return invert_pwl(rng.uniform());
    }
    return 0;
  }

  /// Effective support, truncated where the density drops below eps.
  std::pair<double, double> support(double eps = 1e-16) const {
    switch (family) {
      case Family::std_normal: {
        const double c = std::sqrt(-2 * std::log(eps * std::sqrt(2 * M_PI)));
        return {-c, c};
      }
      case Family::gumbel: {
        double lo = -1, hi = 1;
        while (density(lo) > eps) lo -= 1;
        while (density(hi) > eps) hi += 1;
        return {lo, hi};
      }
      case Family::gamma_shape2: {
        double hi = 1;
        while (density(hi) > eps) hi += 1;
        return {0, hi};
      }
      case Family::custom_pwl:
        return {pwl_->domain_lo(), pwl_->domain_hi()};
    }
    return {0, 1};
  }

  const std::optional<PwlConcave>& pwl() const { return pwl_; }

private:
  TrueDensity(Family f, double m, double c) : family(f), mode(m), curvature_at_mode(c) {}
  std::optional<PwlConcave> pwl_;

  // inverse CDF within the segment of the piecewise-exponential density
  double invert_pwl(double p) const {
    const auto& f = *pwl_;
    const auto& x = f.knots();
    std::size_t lo = 0, hi = x.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (f.cdf(x[mid]) < p ? lo : hi) = mid;
    }
    const double target = p - f.cdf(x[lo]);
    const double v0 = f.values()[lo];
    const double b = (f.values()[lo + 1] - v0) / (x[lo + 1] - x[lo]);
    if (std::abs(b) < 1e-12) return x[lo] + target * std::exp(-v0);
    return x[lo] + std::log1p(target * b * std::exp(-v0)) / b;
  }
};

/// Deterministic sampler: identical (d, n, seed) gives bitwise-identical
/// output.
inline SortedSample sample_density(const TrueDensity& d, long n, std::uint64_t seed) {
  if (n < 2) throw DegenerateSampleError("need n >= 2");
  Rng rng(seed);
  std::vector<double> raw;
  raw.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) raw.push_back(d.sample_one(rng));
  return SortedSample::from_raw(std::move(raw));
}

} // namespace logcave
