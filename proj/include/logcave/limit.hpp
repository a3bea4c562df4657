#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "logcave/errors.hpp"
#include "logcave/parallel.hpp"
#include "logcave/rng.hpp"

namespace logcave {

/// Discretized two-sided driver X(t) = sigma W(t) - 4 a t^3 on a uniform
/// cell grid.  Cells are centred so that t = 0 is the midpoint of the middle
/// cell; the edge grid is symmetric about 0 and W is anchored by W(0) = 0.
struct DriverPath {
  double delta = 0;
  double half_width = 0;
  double drift_a = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> grid; // cell edges, size cells()+1
  std::vector<double> dw;   // Brownian increment per cell (variance delta)
  std::vector<double> dx;   // full driver increment per cell
  double w_half_left = 0;   // W(-delta/2), kept so refinement stays exact
  double w_half_right = 0;  // W(+delta/2)

  int cells() const { return static_cast<int>(dx.size()); }
  int center() const { return cells() / 2; } // only meaningful for odd cells
  double cell_mid(int j) const { return 0.5 * (grid[j] + grid[j + 1]); }

  /// W at the cell edges (anchored at W(0) = 0), for diagnostics.
  std::vector<double> w_edges() const {
    std::vector<double> w(grid.size());
    const int M = center();
    w[M] = w_half_left;
    for (int k = M; k-- > 0;) w[k] = w[k + 1] - dw[k];
    w[M + 1] = w_half_right;
    for (int k = M + 2; k < static_cast<int>(w.size()); ++k) w[k] = w[k - 1] + dw[k - 1];
    return w;
  }
};

inline DriverPath simulate_driver(double half_width, double delta, std::uint64_t seed,
                                  double drift_a = 1.0, double sigma = 1.0) {
  if (!(half_width > 0) || !(delta > 0)) throw std::invalid_argument("bad driver grid");
  DriverPath p;
  p.delta = delta;
  p.half_width = half_width;
  p.drift_a = drift_a;
  p.sigma = sigma;
  p.seed = seed;
  const int M = std::max(1, static_cast<int>(std::lround(half_width / delta)));
  const int cells = 2 * M + 1;
  p.grid.resize(cells + 1);
  for (int k = 0; k <= cells; ++k) p.grid[k] = (k - M - 0.5) * delta;

  Rng rng(seed);
  // fixed draw order: the two half-cell increments at 0, then the cells
  // rightward of the centre, then leftward
  p.w_half_right = rng.normal(std::sqrt(delta / 2));
  p.w_half_left = -rng.normal(std::sqrt(delta / 2)); // W(-d/2) = -(increment to 0)
  std::vector<double> right(M), left(M);
  for (int k = 0; k < M; ++k) right[k] = rng.normal(std::sqrt(delta));
  for (int k = 0; k < M; ++k) left[k] = rng.normal(std::sqrt(delta));

  p.dw.assign(cells, 0.0);
  p.dw[M] = p.w_half_right - p.w_half_left;
  for (int k = 0; k < M; ++k) p.dw[M + 1 + k] = right[k];
  for (int k = 0; k < M; ++k) p.dw[M - 1 - k] = left[k];

  p.dx.assign(cells, 0.0);
  for (int j = 0; j < cells; ++j) {
    const double t0 = p.grid[j], t1 = p.grid[j + 1];
    p.dx[j] = sigma * p.dw[j] - 4.0 * drift_a * (t1 * t1 * t1 - t0 * t0 * t0);
  }
  return p;
}

/// Halve delta by Brownian-bridge interpolation of the same path.  The two
/// central half-cells are already pinned by W(0) = 0, so no new randomness
/// enters there.  The result has an even cell count (0 becomes an edge) and
/// is only meant for the unconstrained refinement check.
inline DriverPath refine_half(const DriverPath& p, std::uint64_t extra_seed) {
  DriverPath q;
  q.delta = p.delta / 2;
  q.half_width = p.half_width;
  q.drift_a = p.drift_a;
  q.sigma = p.sigma;
  q.seed = mix_seed(p.seed, extra_seed);
  const int cells = p.cells();
  q.grid.resize(2 * cells + 1);
  for (int k = 0; k <= 2 * cells; ++k) q.grid[k] = p.grid[0] + k * q.delta;
  q.dw.assign(2 * cells, 0.0);
  Rng rng(q.seed);
  const int M = p.center();
  for (int j = 0; j < cells; ++j) {
    if (j == M) {
      q.dw[2 * j] = -p.w_half_left;
      q.dw[2 * j + 1] = p.w_half_right;
      continue;
    }
    const double first = 0.5 * p.dw[j] + rng.normal(std::sqrt(p.delta / 4));
    q.dw[2 * j] = first;
    q.dw[2 * j + 1] = p.dw[j] - first;
  }
  q.dx.assign(2 * cells, 0.0);
  for (int j = 0; j < 2 * cells; ++j) {
    const double t0 = q.grid[j], t1 = q.grid[j + 1];
    q.dx[j] = q.sigma * q.dw[j] - 4.0 * q.drift_a * (t1 * t1 * t1 - t0 * t0 * t0);
  }
  q.w_half_left = 0;
  q.w_half_right = 0;
  return q;
}

/// Discrete invelope fit: the weighted least-squares concave regression of
/// y_j = dX_j/delta, i.e. the minimizer of (1/2) int g^2 - int g dX over the
/// discretized cone.
struct LimitFit {
  std::vector<double> g;
  std::vector<int> touch_set; // cells where the discrete Y - H vanishes
  double objective = 0;
  bool constrained = false;
  bool converged = false;
  int iterations = 0;

  std::vector<int> kinks;   // genuine concavity kinks (cell indices)
  double scale = 1;         // max(1, max |Y|), for relative tolerances
  double max_hy_violation = 0;   // worst negative part of the KKT processes
  double worst_touch_gap = 0;    // worst |Y-H| at an interior kink
  double full_window_balance = 0; // |sum (g delta - dX)| over the window

  // constrained-only diagnostics
  int tau_minus = -1, tau_plus = -1; // modal interval cells
  double modal_max_slope = 0;        // max |increment|/delta on the interval
  double mid_condition_residual = std::numeric_limits<double>::quiet_NaN();
};

namespace limit_detail {

inline std::vector<double> tridiag_solve(std::vector<double> d, std::vector<double> e,
                                         std::vector<double> b) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double l = e[i - 1] / d[i - 1];
    d[i] -= l * e[i - 1];
    b[i] -= l * b[i - 1];
    e[i - 1] = l;
  }
  b[n - 1] /= d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) b[i] = b[i] / d[i] - e[i] * b[i + 1];
  return b;
}

/// Active-set projection onto the cone of concave cell sequences, optionally
/// with the maximum pinned to the central cell.  The quadratic objective is
/// solved exactly on each kink structure; the mode cone is handled by tying
/// the centre value flat to a neighbour, as in the finite-sample solver.
class ConcaveLS {
public:
  ConcaveLS(const std::vector<double>& y, double delta, int mode_cell)
      : y_(y), delta_(delta), mode_(mode_cell), J_(static_cast<int>(y.size())) {}

  struct Result {
    std::vector<double> g;
    bool converged = false;
    int iterations = 0;
  };

  Result solve(const std::vector<int>& warm = {}) {
    act_ = {0, J_ - 1};
    if (mode_ > 0 && mode_ < J_ - 1) act_.push_back(mode_);
    for (int k : warm)
      if (k > 0 && k < J_ - 1) act_.push_back(k);
    std::sort(act_.begin(), act_.end());
    act_.erase(std::unique(act_.begin(), act_.end()), act_.end());
    tie_left_ = tie_right_ = false;
    double mean = 0;
    for (double v : y_) mean += v;
    mean /= J_;
    u_.assign(act_.size(), mean);

    // tolerance scale: the Y process magnitude
    double acc = 0, accacc = 0;
    scale_ = 1;
    for (int j = 0; j < J_; ++j) {
      acc += y_[j] * delta_;
      accacc += acc * delta_;
      scale_ = std::max(scale_, std::abs(accacc));
    }

    Result res;
    const int cap = 50 + 4 * J_;
    double best_obj = std::numeric_limits<double>::infinity();
    int stagnant = 0;
    for (int it = 0; it < cap; ++it) {
      res.iterations = it + 1;
      if (!descend_to_structure_optimum()) break;
      const auto [ins, worst] = certificate_insertion();
      if (ins < 0) {
        res.converged = true;
        break;
      }
      // anti-cycling: near the fp floor insertions stop paying; accept when
      // the leftover violation is far below the certificate tolerances
      const double obj = objective();
      if (!std::isfinite(best_obj) || obj < best_obj - 1e-12 * (1 + std::abs(best_obj))) {
        best_obj = obj;
        stagnant = 0;
      } else if (++stagnant >= 25) {
        res.converged = (-worst <= 1e-6 * scale_);
        break;
      }
      const std::vector<double> g = interpolate();
      act_.insert(std::lower_bound(act_.begin(), act_.end(), ins), ins);
      u_.resize(act_.size());
      for (std::size_t p = 0; p < act_.size(); ++p) u_[p] = g[act_[p]];
    }
    res.g = interpolate();
    return res;
  }

  double objective() const {
    const std::vector<double> g = interpolate();
    double f = 0;
    for (int j = 0; j < J_; ++j) {
      const double e = g[j] - y_[j];
      f += 0.5 * delta_ * e * e;
    }
    return f;
  }

  double scale() const { return scale_; }

private:
  const std::vector<double>& y_;
  double delta_;
  int mode_;
  int J_;
  std::vector<int> act_;
  std::vector<double> u_;
  bool tie_left_ = false, tie_right_ = false;
  double scale_ = 1;

  int mode_pos() const {
    if (mode_ < 0) return -1;
    auto it = std::lower_bound(act_.begin(), act_.end(), mode_);
    return (it != act_.end() && *it == mode_) ? static_cast<int>(it - act_.begin()) : -1;
  }

  std::vector<double> interpolate() const {
    std::vector<double> g(J_);
    for (std::size_t p = 0; p + 1 < act_.size(); ++p) {
      const int a = act_[p], b = act_[p + 1];
      for (int j = a; j <= b; ++j) {
        const double t = static_cast<double>(j - a) / (b - a);
        g[j] = (1 - t) * u_[p] + t * u_[p + 1];
      }
    }
    return g;
  }

  std::vector<int> class_map() const {
    std::vector<int> cls(act_.size());
    const int mp = mode_pos();
    int c = 0;
    for (std::size_t p = 0; p < act_.size(); ++p) {
      if (p > 0) {
        const bool merged = (mp >= 0) && ((tie_left_ && static_cast<int>(p) == mp) ||
                                          (tie_right_ && static_cast<int>(p) == mp + 1));
        if (!merged) ++c;
      }
      cls[p] = c;
    }
    return cls;
  }

  /// Exact reduced LS optimum for the current structure; walk toward it with
  /// feasibility pullback, mutating the structure on blocking events.
  /// Returns true when the feasible structure optimum was reached.
  bool descend_to_structure_optimum() {
    for (int guard = 0; guard < 4 * J_ + 16; ++guard) {
      const std::vector<int> cls = class_map();
      const int ncls = cls.back() + 1;
      std::vector<double> hd(ncls, 0.0), he(ncls > 1 ? ncls - 1 : 0, 0.0),
          rhs(ncls, 0.0);
      for (std::size_t p = 0; p + 1 < act_.size(); ++p) {
        const int a = act_[p], b = act_[p + 1];
        for (int j = a; j <= b; ++j) {
          if (j == a && p > 0) continue;
          const double t = static_cast<double>(j - a) / (b - a);
          const int c0 = cls[p], c1 = cls[p + 1];
          const double w0 = 1 - t, w1 = t;
          hd[c0] += w0 * w0;
          hd[c1] += w1 * w1;
          if (c0 == c1)
            hd[c0] += 2 * w0 * w1;
          else
            he[c0] += w0 * w1;
          rhs[c0] += w0 * y_[j];
          rhs[c1] += w1 * y_[j];
        }
      }
      const std::vector<double> uc = tridiag_solve(hd, he, rhs);
      std::vector<double> target(act_.size());
      for (std::size_t p = 0; p < act_.size(); ++p) target[p] = uc[cls[p]];

      std::vector<double> dir(act_.size());
      double dmax = 0;
      for (std::size_t p = 0; p < act_.size(); ++p) {
        dir[p] = target[p] - u_[p];
        dmax = std::max(dmax, std::abs(dir[p]));
      }
      if (dmax <= 1e-14 * (1 + std::abs(u_[0]))) {
        if (release_ties()) continue;
        return true;
      }
      int blocker = -1;
      const double t_feas = ratio_test(dir, blocker);
      const double t = std::min(1.0, t_feas);
      for (std::size_t p = 0; p < act_.size(); ++p) u_[p] += t * dir[p];
      if (t >= 1.0) {
        if (release_ties()) continue;
        return true;
      }
      apply_structural(blocker);
    }
    return false;
  }

  double ratio_test(const std::vector<double>& dir, int& blocker) const {
    double tmax = std::numeric_limits<double>::infinity();
    blocker = -1;
    const int mp = mode_pos();
    auto consider = [&](double val, double d, int who) {
      if (d <= 1e-300) return;
      const double lim = std::max(0.0, -val) / d;
      if (lim < tmax - 1e-15 * (1 + lim)) {
        tmax = lim;
        blocker = who;
      }
    };
    for (std::size_t p = 1; p + 1 < act_.size(); ++p) {
      const double ll = act_[p] - act_[p - 1], lr = act_[p + 1] - act_[p];
      const double sl = (u_[p] - u_[p - 1]) / ll, sr = (u_[p + 1] - u_[p]) / lr;
      const double dsl = (dir[p] - dir[p - 1]) / ll, dsr = (dir[p + 1] - dir[p]) / lr;
      if (static_cast<int>(p) == mp) {
        if (!tie_left_) consider(-sl, -dsl, -2);
        if (!tie_right_) consider(sr, dsr, -3);
      } else {
        consider(sr - sl, dsr - dsl, static_cast<int>(p));
      }
    }
    if (mp == 0 && act_.size() >= 2 && !tie_right_) {
      const double lr = act_[1] - act_[0];
      consider((u_[1] - u_[0]) / lr, (dir[1] - dir[0]) / lr, -3);
    }
    if (mp == static_cast<int>(act_.size()) - 1 && mp > 0 && !tie_left_) {
      const double ll = act_[mp] - act_[mp - 1];
      consider(-(u_[mp] - u_[mp - 1]) / ll, -(dir[mp] - dir[mp - 1]) / ll, -2);
    }
    return tmax;
  }

  void apply_structural(int blocker) {
    if (blocker == -2) {
      tie_left_ = true;
      const int mp = mode_pos();
      if (mp > 0) u_[mp - 1] = u_[mp] = 0.5 * (u_[mp - 1] + u_[mp]);
    } else if (blocker == -3) {
      tie_right_ = true;
      const int mp = mode_pos();
      if (mp + 1 < static_cast<int>(act_.size()))
        u_[mp] = u_[mp + 1] = 0.5 * (u_[mp] + u_[mp + 1]);
    } else if (blocker > 0 && blocker + 1 < static_cast<int>(act_.size())) {
      const std::vector<double> g = interpolate();
      act_.erase(act_.begin() + blocker);
      u_.resize(act_.size());
      for (std::size_t p = 0; p < act_.size(); ++p) u_[p] = g[act_[p]];
    }
  }

  bool release_ties() {
    const int mp = mode_pos();
    if (mp < 0 || (!tie_left_ && !tie_right_)) return false;
    // reduced residual gradient; the tie multipliers sit at the neighbours
    const std::vector<double> g = interpolate();
    std::vector<double> gr(act_.size(), 0.0);
    for (std::size_t p = 0; p + 1 < act_.size(); ++p) {
      const int a = act_[p], b = act_[p + 1];
      for (int j = a; j <= b; ++j) {
        if (j == a && p > 0) continue;
        const double t = static_cast<double>(j - a) / (b - a);
        const double r = delta_ * (y_[j] - g[j]);
        gr[p] += (1 - t) * r;
        gr[p + 1] += t * r;
      }
    }
    const double tol = 1e-12 * delta_ * (1 + scale_);
    bool released = false;
    if (tie_left_ && mp >= 1 && gr[mp - 1] < -tol) {
      tie_left_ = false;
      released = true;
    }
    if (tie_right_ && mp + 1 < static_cast<int>(act_.size()) && gr[mp + 1] < -tol) {
      tie_right_ = false;
      released = true;
    }
    return released;
  }

  /// Exact discrete KKT: the double cumulative sums of the residual must be
  /// nonnegative (left-anchored left of the mode, right-anchored right of
  /// it).  Returns the kink index of the worst violation (or -1 when within
  /// tolerance) together with the violation value.
  std::pair<int, double> certificate_insertion() const {
    const std::vector<double> g = interpolate();
    std::vector<double> r(J_);
    for (int j = 0; j < J_; ++j) r[j] = delta_ * (y_[j] - g[j]);
    const double tol = 1e-10 * scale_;
    int worst_idx = -1;
    double worst = -0.25 * tol;
    auto is_active = [&](int i) {
      return std::binary_search(act_.begin(), act_.end(), i);
    };
    auto look = [&](double val, int kink) {
      if (val < worst && !is_active(kink)) {
        worst = val;
        worst_idx = kink;
      }
    };
    if (mode_ < 0) {
      double A = 0, B = 0;
      for (int l = 0; l + 1 < J_; ++l) {
        A += r[l];
        B += A * delta_;
        look(B, l + 1);
      }
      return {worst_idx, worst};
    }
    double A = 0, B = 0;
    for (int l = 0; l <= mode_ - 2; ++l) {
      A += r[l];
      B += A * delta_;
      look(B, l + 1);
    }
    double Ar = 0, Br = 0;
    for (int l = J_ - 1; l >= mode_ + 2; --l) {
      Ar += r[l];
      Br += Ar * delta_;
      look(Br, l - 1);
    }
    return {worst_idx, worst};
  }
};

/// Shared post-processing: kinks, touch sets, KKT residuals, modal data.
inline LimitFit finalize(const DriverPath& p, const ConcaveLS::Result& res,
                         double scale, bool constrained) {
  LimitFit f;
  f.g = res.g;
  f.converged = res.converged;
  f.iterations = res.iterations;
  f.constrained = constrained;
  f.scale = scale;
  const int J = static_cast<int>(f.g.size());
  const double delta = p.delta;

  f.objective = 0;
  for (int j = 0; j < J; ++j)
    f.objective += 0.5 * f.g[j] * f.g[j] * delta - f.g[j] * p.dx[j];

  // genuine kinks of the cell sequence
  const double kink_tol = 1e-7 * delta * (1 + scale);
  for (int j = 1; j + 1 < J; ++j) {
    const double c = f.g[j - 1] - 2 * f.g[j] + f.g[j + 1];
    if (c < -kink_tol) f.kinks.push_back(j);
  }

  std::vector<double> r(J);
  double bal = 0;
  for (int j = 0; j < J; ++j) {
    r[j] = p.dx[j] - delta * f.g[j];
    bal += r[j];
  }
  f.full_window_balance = std::abs(bal);

  // KKT processes: left-anchored for the left half, right-anchored for the
  // right (they coincide for the unconstrained fit up to the exact affine
  // balance)
  const int M = constrained ? J / 2 : J - 1;
  std::vector<double> P(J, 0.0), Q(J, 0.0);
  {
    double A = 0, B = 0;
    for (int l = 0; l < J; ++l) {
      A += r[l];
      B += A * delta;
      P[l] = B;
    }
    double Ar = 0, Br = 0;
    for (int l = J - 1; l >= 0; --l) {
      Ar += r[l];
      Br += Ar * delta;
      Q[l] = Br;
    }
  }
  const int trim = J / 10; // window edges are truncation artifacts
  const double touch_tol = 1e-6 * scale;
  for (int l = 0; l < J; ++l) {
    const bool left_ok = !constrained || l <= M - 2;
    const bool right_ok = constrained && l >= M + 2;
    if (left_ok) {
      f.max_hy_violation = std::max(f.max_hy_violation, -P[l]);
      if (P[l] <= touch_tol) f.touch_set.push_back(l);
    } else if (right_ok) {
      f.max_hy_violation = std::max(f.max_hy_violation, -Q[l]);
      if (Q[l] <= touch_tol) f.touch_set.push_back(l);
    }
  }
  for (int k : f.kinks) {
    if (k < trim || k >= J - trim) continue;
    if (!constrained || k <= M - 1)
      f.worst_touch_gap = std::max(f.worst_touch_gap, std::abs(P[k - 1]));
    else if (k >= M + 1)
      f.worst_touch_gap = std::max(f.worst_touch_gap, std::abs(Q[k + 1]));
  }

  if (constrained) {
    // tau_-^0 / tau_+^0: last kink with strictly positive slope on its
    // left, first kink with strictly negative slope on its right.  The open
    // interval between them is the modal interval (empty when the centre
    // cell is itself a strict kink).
    const double stol = 1e-10 * delta * (1 + scale);
    int tmin = 0, tmax = J - 1;
    for (int k : f.kinks) {
      if (f.g[k] - f.g[k - 1] > stol) tmin = std::max(tmin, k);
      if (f.g[k + 1] - f.g[k] < -stol && tmax == J - 1) tmax = k;
    }
    f.tau_minus = tmin;
    f.tau_plus = tmax;
    for (int j = tmin; j + 1 <= tmax; ++j)
      f.modal_max_slope =
          std::max(f.modal_max_slope, std::abs(f.g[j + 1] - f.g[j]) / delta);

    // mid-condition over the open interval between the bend points nearest
    // to 0 (the centre cell itself excluded)
    int tl = 0, tr = J - 1;
    for (int k : f.kinks) {
      if (k < M) tl = std::max(tl, k);
      if (k > M && tr == J - 1) tr = k;
    }
    double mid = 0;
    for (int j = tl + 1; j <= tr - 1; ++j) mid += delta * f.g[j] - p.dx[j];
    f.mid_condition_residual = std::abs(mid);
  }
  return f;
}

} // namespace limit_detail

/// Unconstrained discrete invelope: concave regression of dX/delta.
inline LimitFit invelope_unconstrained(const DriverPath& p) {
  const int J = p.cells();
  std::vector<double> y(J);
  for (int j = 0; j < J; ++j) y[j] = p.dx[j] / p.delta;
  limit_detail::ConcaveLS ls(y, p.delta, -1);
  auto res = ls.solve();
  if (!res.converged)
    throw NonConvergenceError("concave regression did not converge", 0.0);
  return limit_detail::finalize(p, res, ls.scale(), false);
}

/// Mode-constrained discrete invelope: maximum pinned to the cell containing
/// 0; warm-started from the unconstrained kink structure.
inline LimitFit invelope_constrained(const DriverPath& p) {
  const int J = p.cells();
  if (J % 2 == 0)
    throw std::invalid_argument("constrained invelope needs the centred (odd) grid");
  std::vector<double> y(J);
  for (int j = 0; j < J; ++j) y[j] = p.dx[j] / p.delta;
  LimitFit warm_fit = invelope_unconstrained(p);
  limit_detail::ConcaveLS ls(y, p.delta, J / 2);
  auto res = ls.solve(warm_fit.kinks);
  if (!res.converged)
    throw NonConvergenceError("constrained concave regression did not converge", 0.0);
  return limit_detail::finalize(p, res, ls.scale(), true);
}

/// Value of the fitted cell sequence at abscissa t (linear in cell centres).
inline double limit_value_at(const DriverPath& p, const LimitFit& f, double t) {
  const int J = p.cells();
  const double first = p.cell_mid(0);
  const double pos = (t - first) / p.delta;
  const int j = std::clamp(static_cast<int>(std::floor(pos)), 0, J - 2);
  const double w = pos - j;
  return (1 - w) * f.g[j] + w * f.g[j + 1];
}

// ---- pointwise limit constants --------------------------------------------

struct LimitConstants {
  double c_f, d_f, C_phi, D_phi;
};

/// The four constants of the pointwise limit distributions.
inline LimitConstants limit_constants(double f0_at_mode, double curvature) {
  if (!(f0_at_mode > 0)) throw std::invalid_argument("f0(m) must be positive");
  if (!(curvature < 0))
    throw std::invalid_argument("needs strict curvature phi''(m) < 0");
  const double ac = std::abs(curvature);
  const double fac = 24.0; // 4!
  LimitConstants c{};
  c.c_f = std::pow(f0_at_mode * f0_at_mode * f0_at_mode * ac / fac, 0.2);
  c.d_f = std::pow(std::pow(f0_at_mode, 4) * std::pow(ac, 3) / std::pow(fac, 3), 0.2);
  c.C_phi = std::pow(ac / (f0_at_mode * f0_at_mode * fac), 0.2);
  c.D_phi = std::pow(std::pow(ac, 3) / (f0_at_mode * std::pow(fac, 3)), 0.2);
  return c;
}

// ---- limit distribution experiment -----------------------------------------

struct LimitSamples {
  std::vector<double> phi_unc;        // phi-hat(0)
  std::vector<double> dphi_unc_left;  // left slope at 0
  std::vector<double> dphi_unc_right; // right slope at 0
  std::vector<double> phi_con;        // constrained analogues
  std::vector<double> dphi_con_left;
  std::vector<double> dphi_con_right;
  long dropped = 0;
};

/// Empirical samples of the limit functionals over seeded driver paths.
/// Replications own substreams and run in parallel; more than 2% dropped
/// replications fails the run.
inline LimitSamples limit_distribution_experiment(int reps, double half_width,
                                                  double delta, std::uint64_t seed) {
  LimitSamples out;
  out.phi_unc.assign(reps, std::numeric_limits<double>::quiet_NaN());
  out.dphi_unc_left.assign(reps, 0);
  out.dphi_unc_right.assign(reps, 0);
  out.phi_con.assign(reps, std::numeric_limits<double>::quiet_NaN());
  out.dphi_con_left.assign(reps, 0);
  out.dphi_con_right.assign(reps, 0);
  std::atomic<long> dropped{0};
  parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
    try {
      const DriverPath p = simulate_driver(half_width, delta, mix_seed(seed, rep));
      const LimitFit fu = invelope_unconstrained(p);
      const LimitFit fc = invelope_constrained(p);
      const int M = p.center();
      out.phi_unc[rep] = fu.g[M];
      out.dphi_unc_left[rep] = (fu.g[M] - fu.g[M - 1]) / p.delta;
      out.dphi_unc_right[rep] = (fu.g[M + 1] - fu.g[M]) / p.delta;
      out.phi_con[rep] = fc.g[M];
      out.dphi_con_left[rep] = (fc.g[M] - fc.g[M - 1]) / p.delta;
      out.dphi_con_right[rep] = (fc.g[M + 1] - fc.g[M]) / p.delta;
    } catch (const NonConvergenceError&) {
      dropped.fetch_add(1);
    }
  });
  out.dropped = dropped.load();
  if (out.dropped * 50 > reps)
    throw std::runtime_error("more than 2% of limit replications failed");
  auto compact = [&](std::vector<double>& v) {
    std::vector<double> kept;
    for (double x : v)
      if (std::isfinite(x)) kept.push_back(x);
    v = std::move(kept);
  };
  // drop the slope slots of failed reps in lockstep with the values
  std::vector<char> ok(reps, 1);
  for (int i = 0; i < reps; ++i) ok[i] = std::isfinite(out.phi_unc[i]) ? 1 : 0;
  auto filter = [&](std::vector<double>& v) {
    std::vector<double> kept;
    for (int i = 0; i < reps; ++i)
      if (ok[i]) kept.push_back(v[i]);
    v = std::move(kept);
  };
  filter(out.dphi_unc_left);
  filter(out.dphi_unc_right);
  filter(out.phi_con);
  filter(out.dphi_con_left);
  filter(out.dphi_con_right);
  compact(out.phi_unc);
  return out;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

} // namespace logcave
