#pragma once

#include <cmath>
#include <functional>
#include <vector>

// Test-only numerical oracles, independent of the library implementation.

namespace testsupport {

/// Nodes and weights of n-point Gauss-Legendre quadrature on [-1, 1].
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int k = 1; k <= (n + 1) / 2; ++k) {
    double t = std::cos(M_PI * (k - 0.25) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * t * p1 - j * p2) / (j + 1);
      }
      pp = n * (t * p0 - p1) / (t * t - 1);
      const double dt = p0 / pp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[k - 1] = -t;
    x[n - k] = t;
    w[k - 1] = 2.0 / ((1 - t * t) * pp * pp);
    w[n - k] = w[k - 1];
  }
}

inline double gl_integrate(const std::function<double(double)>& f, double a,
                           double b, int n = 200) {
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  double s = 0;
  for (int i = 0; i < n; ++i)
    s += w[i] * f(0.5 * (a + b) + 0.5 * (b - a) * x[i]);
  return 0.5 * (b - a) * s;
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb,
                                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
    return left + right + (left + right - whole) / 15;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace testsupport
