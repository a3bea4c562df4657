#pragma once

#include <algorithm>
#include <cmath>

namespace logcave {

// Segment integrals of exponentials of affine functions.  With d = s - r,
//
//   j00(r,s) = int_0^1 exp((1-t) r + t s) dt          = (e^s - e^r)/(s - r)
//   j10(r,s) = d/dr j00 = int_0^1 (1-t) exp(.) dt     = e^r sum_k d^k/(k+2)!
//   j20(r,s) = d2/dr2 j00 = int_0^1 (1-t)^2 exp(.) dt = e^r sum_k 2 d^k/(k+3)!
//   j11(r,s) = d2/drds j00 = int_0^1 t(1-t) exp(.) dt = e^r sum_k (k+1) d^k/(k+3)!
//
// Everything that integrates e^phi over a segment of a piecewise-linear phi
// reduces to these.  Closed forms cancel catastrophically near r = s, so each
// kernel switches to its Taylor series for small |d|.

/// j00: factored as e^{max(r,s)} (1 - e^{-|d|})/|d| so the difference never
/// cancels; series in d below 1e-5.  Saturates to 0 on extreme underflow,
/// never NaN.
inline double j00(double r, double s) {
  const double d = s - r;
  const double ad = std::abs(d);
  if (ad < 1e-5) {
    const double p =
        1.0 + d * (1.0 / 2 + d * (1.0 / 6 + d * (1.0 / 24 + d * (1.0 / 120 + d * (1.0 / 720)))));
    return std::exp(r) * p;
  }
  const double m = std::max(r, s);
  return std::exp(m) * (-std::expm1(-ad)) / ad;
}

inline double j10(double r, double s) {
  const double d = s - r;
  if (std::abs(d) < 1.0) {
    // sum_k d^k/(k+2)!, converged to machine precision within ~20 terms
    double term = 0.5, sum = 0.5;
    for (int k = 1; k <= 26; ++k) {
      term *= d / (k + 2);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return std::exp(r) * sum;
  }
  return std::exp(r) * (std::expm1(d) - d) / (d * d);
}

inline double j20(double r, double s) {
  const double d = s - r;
  if (std::abs(d) < 1.0) {
    // 2 * sum_k d^k/(k+3)!
    double term = 1.0 / 6, sum = 1.0 / 6;
    for (int k = 1; k <= 26; ++k) {
      term *= d / (k + 3);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return 2.0 * std::exp(r) * sum;
  }
  return 2.0 * std::exp(r) * (std::expm1(d) - d - 0.5 * d * d) / (d * d * d);
}

inline double j11(double r, double s) {
  const double d = s - r;
  if (std::abs(d) < 1.0) {
    // sum_k (k+1) d^k/(k+3)!
    double term = 1.0 / 6, sum = 1.0 / 6;
    for (int k = 1; k <= 26; ++k) {
      term *= d / (k + 3);
      sum += (k + 1) * term;
      if ((k + 1) * std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return std::exp(r) * sum;
  }
  const double em = std::expm1(d);
  return std::exp(r) * ((em - d) / (d * d) - 2.0 * (em - d - 0.5 * d * d) / (d * d * d));
}

/// int_0^1 t exp((1-t) r + t s) dt
inline double j01(double r, double s) { return j10(s, r); }
/// int_0^1 t^2 exp((1-t) r + t s) dt
inline double j02(double r, double s) { return j20(s, r); }

} // namespace logcave
