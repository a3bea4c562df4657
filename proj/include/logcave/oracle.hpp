#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "logcave/certificate.hpp"
#include "logcave/errors.hpp"
#include "logcave/solver.hpp"

namespace logcave {

struct OracleResult {
  Fit best;
  long subsets_tried = 0;
  long feasible_count = 0;
};

namespace oracle_detail {

// Dense Newton on a fixed kink structure, independent of the production
// solver's reduced machinery (shared j-kernels only).  Coordinates are the
// values at the structure points, optionally with the mode value tied flat to
// a neighbour; everything else is affine interpolation.

struct Config {
  std::vector<int> structure; // grid indices, incl endpoints (and mode)
  bool tie_left = false;      // flat segment ending at the mode
  bool tie_right = false;     // flat segment starting at the mode
  int mode_grid = -1;
};

inline std::vector<int> classes_of(const Config& c) {
  std::vector<int> cls(c.structure.size());
  int mp = -1;
  for (std::size_t p = 0; p < c.structure.size(); ++p)
    if (c.structure[p] == c.mode_grid) mp = static_cast<int>(p);
  int id = 0;
  for (std::size_t p = 0; p < c.structure.size(); ++p) {
    if (p > 0) {
      const bool merged = (mp >= 0) && ((c.tie_left && static_cast<int>(p) == mp) ||
                                        (c.tie_right && static_cast<int>(p) == mp + 1));
      if (!merged) ++id;
    }
    cls[p] = id;
  }
  return cls;
}

inline std::vector<double> interpolate(const std::vector<double>& z,
                                       const Config& c,
                                       const std::vector<int>& cls,
                                       const std::vector<double>& uc) {
  std::vector<double> v(z.size());
  for (std::size_t p = 0; p + 1 < c.structure.size(); ++p) {
    const int a = c.structure[p], b = c.structure[p + 1];
    const double ua = uc[cls[p]], ub = uc[cls[p + 1]];
    for (int j = a; j <= b; ++j) {
      const double t = (z[j] - z[a]) / (z[b] - z[a]);
      v[j] = (1 - t) * ua + t * ub;
    }
  }
  return v;
}

inline double psi(const std::vector<double>& z, const std::vector<double>& w,
                  const std::vector<double>& v) {
  double lin = 0, mass = 0;
  for (std::size_t i = 0; i < z.size(); ++i) lin += w[i] * v[i];
  for (std::size_t i = 0; i + 1 < z.size(); ++i)
    mass += (z[i + 1] - z[i]) * j00(v[i], v[i + 1]);
  return lin - mass;
}

/// Solve the small dense symmetric system by Gaussian elimination.
inline bool dense_solve(std::vector<std::vector<double>> A, std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    if (std::abs(A[piv][c]) < 1e-300) return false;
    std::swap(A[piv], A[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t r = n; r-- > 0;) {
    for (std::size_t k = r + 1; k < n; ++k) b[r] -= A[r][k] * b[k];
    b[r] /= A[r][r];
  }
  return true;
}

struct NewtonOut {
  std::vector<double> v;
  bool converged = false;
  int iterations = 0;
};

inline NewtonOut newton(const std::vector<double>& z, const std::vector<double>& w,
                        const Config& cfg) {
  const std::vector<int> cls = classes_of(cfg);
  const int k = cls.back() + 1;
  const int N = static_cast<int>(z.size());
  std::vector<double> uc(k, -std::log(z.back() - z.front()));
  NewtonOut out;

  // interpolation weights of each grid value onto the coordinate classes
  std::vector<std::vector<double>> B(N, std::vector<double>(k, 0.0));
  for (std::size_t p = 0; p + 1 < cfg.structure.size(); ++p) {
    const int a = cfg.structure[p], b = cfg.structure[p + 1];
    for (int j = a; j <= b; ++j) {
      if (j == a && p > 0) continue;
      const double t = (z[j] - z[a]) / (z[b] - z[a]);
      B[j][cls[p]] += 1 - t;
      B[j][cls[p + 1]] += t;
    }
  }

  for (int it = 0; it < 200; ++it) {
    ++out.iterations;
    const std::vector<double> v = interpolate(z, cfg, cls, uc);
    // full gradient of Psi, then reduce through B
    std::vector<double> g(N);
    for (int i = 0; i < N; ++i) {
      double t = w[i];
      if (i > 0) t -= (z[i] - z[i - 1]) * j01(v[i - 1], v[i]);
      if (i + 1 < N) t -= (z[i + 1] - z[i]) * j10(v[i], v[i + 1]);
      g[i] = t;
    }
    std::vector<double> gc(k, 0.0);
    for (int i = 0; i < N; ++i)
      for (int c = 0; c < k; ++c) gc[c] += B[i][c] * g[i];
    double gmax = 0;
    for (double x : gc) gmax = std::max(gmax, std::abs(x));
    if (gmax <= 1e-12) {
      out.converged = true;
      out.v = v;
      return out;
    }
    // dense reduced Hessian of int e^phi
    std::vector<std::vector<double>> H(k, std::vector<double>(k, 0.0));
    for (int i = 0; i + 1 < N; ++i) {
      const double dz = z[i + 1] - z[i];
      const double h11 = j20(v[i], v[i + 1]);
      const double h22 = j20(v[i + 1], v[i]);
      const double h12 = j11(v[i], v[i + 1]);
      for (int c = 0; c < k; ++c)
        for (int d = 0; d < k; ++d)
          H[c][d] += dz * (B[i][c] * B[i][d] * h11 + B[i + 1][c] * B[i + 1][d] * h22 +
                           (B[i][c] * B[i + 1][d] + B[i + 1][c] * B[i][d]) * h12);
    }
    std::vector<double> d = gc;
    if (!dense_solve(H, d)) break;
    double gd = 0;
    for (int c = 0; c < k; ++c) gd += gc[c] * d[c];
    if (gd <= 0) break;
    const double p0 = psi(z, w, v);
    if (1e-4 * gd <= 1e-15 * (1.0 + std::abs(p0))) {
      // predicted gain below fp resolution of Psi: the Armijo test is pure
      // noise here, and the undamped Newton step contracts
      for (int c = 0; c < k; ++c) uc[c] += d[c];
      continue;
    }
    double t = 1.0;
    bool ok = false;
    while (t > 1e-14) {
      std::vector<double> ut(uc);
      for (int c = 0; c < k; ++c) ut[c] += t * d[c];
      if (psi(z, w, interpolate(z, cfg, cls, ut)) >= p0 + 1e-4 * t * gd) {
        uc = std::move(ut);
        ok = true;
        break;
      }
      t *= 0.5;
    }
    if (!ok) break;
  }
  out.v = interpolate(z, cfg, cls, uc);
  return out;
}

inline bool feasible(const std::vector<double>& z, const std::vector<double>& v,
                     int mode_grid) {
  const int N = static_cast<int>(z.size());
  for (int i = 1; i + 1 < N; ++i) {
    const double sl = (v[i] - v[i - 1]) / (z[i] - z[i - 1]);
    const double sr = (v[i + 1] - v[i]) / (z[i + 1] - z[i]);
    if (sr - sl > 1e-10 * (1 + std::max(std::abs(sl), std::abs(sr)))) return false;
  }
  if (mode_grid >= 0) {
    if (mode_grid > 0) {
      const double sl = (v[mode_grid] - v[mode_grid - 1]) /
                        (z[mode_grid] - z[mode_grid - 1]);
      if (sl < -1e-10 * (1 + std::abs(sl))) return false;
    }
    if (mode_grid + 1 < N) {
      const double sr = (v[mode_grid + 1] - v[mode_grid]) /
                        (z[mode_grid + 1] - z[mode_grid]);
      if (sr > 1e-10 * (1 + std::abs(sr))) return false;
    }
  }
  return true;
}

} // namespace oracle_detail

/// Ground truth for tiny instances by exhaustive enumeration of kink subsets
/// (and of the mode-slope configurations when constrained).  Each candidate
/// is solved by dense Newton to gradient norm 1e-12; the feasible maximizer
/// wins and must itself pass the characterization certificate at 1e-6.
inline OracleResult fit_exact_small(const SortedSample& s,
                                    std::optional<double> m = std::nullopt) {
  s.validate();
  std::vector<double> z, w;
  int mode_grid = -1;
  if (m) {
    AugmentedSample a = augment(s, *m);
    z = a.z;
    w = a.zweights;
    mode_grid = a.mode_index;
  } else {
    z = s.points;
    w = s.weights;
  }
  const int N = static_cast<int>(z.size());
  if (N > 8)
    throw OracleTooLargeError("enumeration oracle supports N <= 8 grid points");

  std::vector<int> interior;
  for (int i = 1; i + 1 < N; ++i)
    if (i != mode_grid) interior.push_back(i);
  const int nint = static_cast<int>(interior.size());

  OracleResult res{Fit{PwlConcave({0, 1}, {0, 0}), {}, 0, 0, 0, 0, false, {}}, 0, 0};
  double best_psi = -std::numeric_limits<double>::infinity();
  std::vector<double> best_v;
  int best_iters = 0;

  for (int mask = 0; mask < (1 << nint); ++mask) {
    oracle_detail::Config cfg;
    cfg.mode_grid = mode_grid;
    cfg.structure.push_back(0);
    for (int b = 0; b < nint; ++b)
      if (mask & (1 << b)) cfg.structure.push_back(interior[b]);
    if (mode_grid > 0 && mode_grid < N - 1) cfg.structure.push_back(mode_grid);
    cfg.structure.push_back(N - 1);
    std::sort(cfg.structure.begin(), cfg.structure.end());
    cfg.structure.erase(std::unique(cfg.structure.begin(), cfg.structure.end()),
                        cfg.structure.end());

    int mp = -1;
    for (std::size_t p = 0; p < cfg.structure.size(); ++p)
      if (cfg.structure[p] == mode_grid) mp = static_cast<int>(p);
    const int ncfg = (mode_grid < 0) ? 1 : 4;
    for (int tc = 0; tc < ncfg; ++tc) {
      cfg.tie_left = tc & 1;
      cfg.tie_right = tc & 2;
      if (cfg.tie_left && mp <= 0) continue;
      if (cfg.tie_right && (mp < 0 || mp + 1 >= static_cast<int>(cfg.structure.size())))
        continue;
      ++res.subsets_tried;
      auto out = oracle_detail::newton(z, w, cfg);
      if (!out.converged) continue;
      if (!oracle_detail::feasible(z, out.v, mode_grid)) continue;
      ++res.feasible_count;
      const double p = oracle_detail::psi(z, w, out.v);
      if (p > best_psi) {
        best_psi = p;
        best_v = out.v;
        best_iters = out.iterations;
      }
    }
  }

  if (best_v.empty())
    throw OracleInconsistentError("no enumerated configuration was feasible");

  Fit f = detail::build_fit(z, best_v, w, m.has_value(),
                            m ? std::optional<double>(*m) : std::nullopt,
                            best_iters, 0.0);
  CharacterizationReport rep = m ? verify_constrained(f.estimate, s, *m, 1e-6)
                                 : verify_unconstrained(f.estimate, s, 1e-6);
  if (!rep.pass)
    throw OracleInconsistentError(
        "enumerated optimum failed the characterization certificate");
  f.max_certificate_violation = rep.worst();
  res.best = std::move(f);
  return res;
}

} // namespace logcave
