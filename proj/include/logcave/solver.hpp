#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "logcave/errors.hpp"
#include "logcave/exp_kernels.hpp"
#include "logcave/pwl.hpp"
#include "logcave/sample.hpp"

namespace logcave {

struct SolverOptions {
  double tol_certificate = 1e-8; // stop when the characterization residual is below
  int max_iter = 500;            // outer active-set iterations
  double damping = 0.5;          // line-search contraction factor
  double min_step = 1e-12;

  void validate() const {
    if (!(tol_certificate > 0) || max_iter <= 0 || !(damping > 0 && damping < 1) ||
        !(min_step > 0))
      throw std::invalid_argument("invalid solver options");
  }
};

/// A solved estimator.  The estimate carries the full Z grid as knots;
/// knot_set lists the indices where it genuinely kinks plus the endpoints.
struct Fit {
  PwlConcave estimate;
  std::vector<int> knot_set;
  double loglik = 0; // P_n phi-hat
  double psi = 0;    // Psi_n value
  int iterations = 0;
  double max_certificate_violation = 0;
  bool constrained = false;
  std::optional<double> mode;
};

/// NonConvergence with the best iterate attached.
class FitNonConvergence : public NonConvergenceError {
public:
  FitNonConvergence(std::string msg, double residual, Fit best)
      : NonConvergenceError(std::move(msg), residual), best_(std::move(best)) {}
  const Fit& best() const { return best_; }

private:
  Fit best_;
};

namespace detail {

/// Symmetric positive definite tridiagonal solve (LDL^T), in place on copies.
inline std::vector<double> tridiag_spd_solve(std::vector<double> d,
                                             std::vector<double> e,
                                             std::vector<double> b) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (d[i - 1] <= 0) d[i - 1] = 1e-300; // PD by construction; guard anyway
    const double l = e[i - 1] / d[i - 1];
    d[i] -= l * e[i - 1];
    b[i] -= l * b[i - 1];
    e[i - 1] = l;
  }
  if (d[n - 1] <= 0) d[n - 1] = 1e-300;
  b[n - 1] /= d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) b[i] = b[i] / d[i] - e[i] * b[i + 1];
  return b;
}

/// Active-set ascent for Psi_n(phi) = sum w_i phi(z_i) - int e^phi over the
/// cone of concave grid functions, optionally restricted to "maximum at
/// z[mode_idx]".  Decision variables are the values at the active knots; the
/// mode cone is handled by tying the value at m flat to a neighbour while the
/// corresponding one-sided slope constraint is active.
class ConeSolver {
public:
  ConeSolver(std::vector<double> z, std::vector<double> w, int mode_idx,
             const SolverOptions& opts)
      : z_(std::move(z)), w_(std::move(w)), mode_(mode_idx), opts_(opts) {
    N_ = static_cast<int>(z_.size());
    dz_.resize(N_ - 1);
    for (int i = 0; i + 1 < N_; ++i) dz_[i] = z_[i + 1] - z_[i];
    cw_.resize(N_);
    double acc = 0;
    for (int i = 0; i < N_; ++i) {
      acc += w_[i];
      cw_[i] = acc;
    }
    // anchors of the integrated processes: first/last point with data mass
    i1_ = 0;
    while (i1_ < N_ - 1 && w_[i1_] == 0.0) ++i1_;
    in_ = N_ - 1;
    while (in_ > 0 && w_[in_] == 0.0) --in_;
  }

  struct Result {
    std::vector<double> v;
    int newton_iterations = 0;
    int outer_iterations = 0;
    double residual = 0;
    bool converged = false;
  };

  Result solve() {
    act_ = {0, N_ - 1};
    if (mode_ > 0 && mode_ < N_ - 1) act_ = {0, mode_, N_ - 1};
    std::sort(act_.begin(), act_.end());
    act_.erase(std::unique(act_.begin(), act_.end()), act_.end());
    tie_left_ = tie_right_ = false;
    u_.assign(act_.size(), -std::log(z_[N_ - 1] - z_[0]));

    double last_psi = -std::numeric_limits<double>::infinity();
    Result res;
    for (int outer = 0; outer < opts_.max_iter; ++outer) {
      res.outer_iterations = outer + 1;
      inner_newton(res);
      const double psi_now = psi_of(full_values());
      if (psi_now < last_psi - 1e-10 * (1.0 + std::abs(last_psi)))
        throw std::logic_error("Psi decreased across active-set iterations by " +
                               std::to_string(last_psi - psi_now));
      last_psi = psi_now;

      Certificate c = certificate();
      res.residual = c.total;
      if (c.total <= 0.25 * opts_.tol_certificate) {
        res.converged = true;
        res.v = snap_concave(full_values());
        return res;
      }
      if (c.insert_index >= 0) {
        const std::vector<double> v = full_values();
        act_.insert(std::lower_bound(act_.begin(), act_.end(), c.insert_index),
                    c.insert_index);
        // the inserted value is the current interpolant, so Psi is unchanged
        u_.resize(act_.size());
        for (std::size_t p = 0; p < act_.size(); ++p) u_[p] = v[act_[p]];
        continue;
      }
      if (c.total <= opts_.tol_certificate) {
        // no insertable violator and the residual floor is within tolerance
        res.converged = true;
        res.v = snap_concave(full_values());
        return res;
      }
      // stationary, feasible, above tolerance: give the inner solver another
      // chance, then report honestly
      if (++stalled_ >= 3) break;
    }
    res.v = snap_concave(full_values());
    return res;
  }

  /// Remove fp-level convex residue left by steps that land exactly on a
  /// constraint boundary: lift offending values onto the chord of their
  /// neighbours.  Moves values by O(1e-10) at most, far below the
  /// certificate tolerance.
  std::vector<double> snap_concave(std::vector<double> v) const {
    for (int pass = 0; pass < 10; ++pass) {
      bool touched = false;
      for (int i = 1; i + 1 < N_; ++i) {
        const double sl = (v[i] - v[i - 1]) / dz_[i - 1];
        const double sr = (v[i + 1] - v[i]) / dz_[i];
        if (sr > sl) {
          const double chord =
              v[i - 1] + (v[i + 1] - v[i - 1]) * dz_[i - 1] / (dz_[i - 1] + dz_[i]);
          if (chord > v[i]) {
            v[i] = chord;
            touched = true;
          }
        }
      }
      if (!touched) break;
    }
    return v;
  }

  double psi_of(const std::vector<double>& v) const {
    double lin = 0, mass = 0;
    for (int i = 0; i < N_; ++i) lin += w_[i] * v[i];
    for (int i = 0; i + 1 < N_; ++i) mass += dz_[i] * j00(v[i], v[i + 1]);
    return lin - mass;
  }

  /// Full gradient of Psi in the value-at-every-grid-point parametrization.
  std::vector<double> full_gradient(const std::vector<double>& v) const {
    std::vector<double> g(N_);
    for (int i = 0; i < N_; ++i) {
      double t = w_[i];
      if (i > 0) t -= dz_[i - 1] * j01(v[i - 1], v[i]);
      if (i + 1 < N_) t -= dz_[i] * j10(v[i], v[i + 1]);
      g[i] = t;
    }
    return g;
  }

private:
  std::vector<double> z_, w_, dz_, cw_;
  int mode_ = -1;
  SolverOptions opts_;
  int N_ = 0;
  int i1_ = 0, in_ = 0;

  std::vector<int> act_;
  std::vector<double> u_;
  bool tie_left_ = false, tie_right_ = false;
  int stalled_ = 0;

  int mode_pos() const {
    if (mode_ < 0) return -1;
    auto it = std::lower_bound(act_.begin(), act_.end(), mode_);
    return (it != act_.end() && *it == mode_) ? static_cast<int>(it - act_.begin())
                                              : -1;
  }

  std::vector<double> full_values() const { return interpolate(u_); }

  std::vector<double> interpolate(const std::vector<double>& u) const {
    std::vector<double> v(N_);
    for (std::size_t p = 0; p + 1 < act_.size(); ++p) {
      const int a = act_[p], b = act_[p + 1];
      const double L = z_[b] - z_[a];
      for (int j = a; j <= b; ++j) {
        const double t = (z_[j] - z_[a]) / L;
        v[j] = (1 - t) * u[p] + t * u[p + 1];
      }
    }
    return v;
  }

  std::vector<double> values_at_active() const {
    std::vector<double> v = full_values(), u(act_.size());
    for (std::size_t p = 0; p < act_.size(); ++p) u[p] = v[act_[p]];
    return u;
  }

  // ---- reduced derivatives -------------------------------------------------

  std::vector<double> reduced_gradient(const std::vector<double>& v) const {
    const std::vector<double> g = full_gradient(v);
    std::vector<double> gr(act_.size(), 0.0);
    for (std::size_t p = 0; p + 1 < act_.size(); ++p) {
      const int a = act_[p], b = act_[p + 1];
      const double L = z_[b] - z_[a];
      for (int j = a; j <= b; ++j) {
        const double t = (z_[j] - z_[a]) / L;
        if (j == a && p > 0) continue; // owned by the previous segment pass
        gr[p] += (1 - t) * g[j];
        gr[p + 1] += t * g[j];
      }
    }
    return gr;
  }

  /// Tridiagonal reduced Hessian of int e^phi (positive definite).
  void reduced_hessian(const std::vector<double>& v, std::vector<double>& hd,
                       std::vector<double>& he) const {
    const std::size_t k = act_.size();
    hd.assign(k, 0.0);
    he.assign(k - 1, 0.0);
    for (std::size_t p = 0; p + 1 < k; ++p) {
      const int a = act_[p], b = act_[p + 1];
      const double L = z_[b] - z_[a];
      for (int j = a; j < b; ++j) {
        const double h11 = j20(v[j], v[j + 1]);
        const double h22 = j20(v[j + 1], v[j]);
        const double h12 = j11(v[j], v[j + 1]);
        const double a0 = (z_[b] - z_[j]) / L;      // weight of u_p in v_j
        const double a1 = (z_[b] - z_[j + 1]) / L;  // weight of u_p in v_{j+1}
        const double w = dz_[j];
        hd[p] += w * (a0 * a0 * h11 + 2 * a0 * a1 * h12 + a1 * a1 * h22);
        hd[p + 1] += w * ((1 - a0) * (1 - a0) * h11 + 2 * (1 - a0) * (1 - a1) * h12 +
                          (1 - a1) * (1 - a1) * h22);
        he[p] += w * (a0 * (1 - a0) * h11 + (a0 * (1 - a1) + a1 * (1 - a0)) * h12 +
                      a1 * (1 - a1) * h22);
      }
    }
  }

  // ---- tie (mode cone) machinery -------------------------------------------

  /// class id per active position after merging tied neighbours of the mode
  std::vector<int> class_map() const {
    std::vector<int> cls(act_.size());
    const int mp = mode_pos();
    int c = 0;
    for (std::size_t p = 0; p < act_.size(); ++p) {
      if (p > 0) {
        const bool merged =
            (mp >= 0) && ((tie_left_ && static_cast<int>(p) == mp) ||
                          (tie_right_ && static_cast<int>(p) == mp + 1));
        if (!merged) ++c;
      }
      cls[p] = c;
    }
    return cls;
  }

  // ---- inner Newton ---------------------------------------------------------

  void inner_newton(Result& res) {
    const int inner_cap = 400;
    for (int it = 0; it < inner_cap; ++it) {
      ++res.newton_iterations;
      std::vector<double> v = interpolate(u_);
      std::vector<double> gr = reduced_gradient(v);
      std::vector<int> cls = class_map();
      const int ncls = cls.back() + 1;

      std::vector<double> gc(ncls, 0.0);
      for (std::size_t p = 0; p < act_.size(); ++p) gc[cls[p]] += gr[p];

      double gmax = 0;
      for (double g : gc) gmax = std::max(gmax, std::abs(g));
      if (gmax <= 1e-13) {
        if (release_ties(gr)) continue;
        return;
      }

      std::vector<double> hd, he;
      reduced_hessian(v, hd, he);
      std::vector<double> hdc(ncls, 0.0), hec(ncls > 1 ? ncls - 1 : 0, 0.0);
      for (std::size_t p = 0; p < act_.size(); ++p) {
        hdc[cls[p]] += hd[p];
        if (p + 1 < act_.size()) {
          if (cls[p] == cls[p + 1])
            hdc[cls[p]] += 2 * he[p];
          else
            hec[cls[p]] += he[p];
        }
      }
      std::vector<double> dc = tridiag_spd_solve(hdc, hec, gc);
      std::vector<double> du(act_.size());
      for (std::size_t p = 0; p < act_.size(); ++p) du[p] = dc[cls[p]];

      double gd = 0;
      for (int c = 0; c < ncls; ++c) gd += gc[c] * dc[c];
      if (gd <= 0) return; // numerically stationary

      int blocker = -1; // encodes the structural event, see ratio_test
      const double t_feas = ratio_test(du, blocker);

      const double psi0 = psi_of(v);
      const double tcap = std::min(1.0, t_feas);
      double t = tcap;
      bool accepted = false;
      if (1e-4 * tcap * gd <= 1e-15 * (1.0 + std::abs(psi0))) {
        // gain below fp resolution of Psi: skip the (pure-noise) Armijo test
        for (std::size_t p = 0; p < act_.size(); ++p) u_[p] += t * du[p];
        accepted = true;
      }
      while (!accepted && t >= opts_.min_step) {
        std::vector<double> ut(u_);
        for (std::size_t p = 0; p < act_.size(); ++p) ut[p] += t * du[p];
        if (psi_of(interpolate(ut)) >= psi0 + 1e-4 * t * gd) {
          u_ = std::move(ut);
          accepted = true;
          break;
        }
        t *= opts_.damping;
      }
      if (!accepted) {
        if (t_feas <= 1e-12 && blocker != -1) {
          apply_structural(blocker);
          continue;
        }
        if (release_ties(reduced_gradient(interpolate(u_)))) continue;
        return; // line search floor
      }
      if (blocker != -1 && t == t_feas) apply_structural(blocker);
    }
  }

  /// Largest feasible step along du; encodes the blocking event:
  ///   blocker = p        -> concavity at active position p (delete the knot)
  ///   blocker = -2 / -3  -> mode cone left / right (activate the tie)
  double ratio_test(const std::vector<double>& du, int& blocker) const {
    double tmax = std::numeric_limits<double>::infinity();
    blocker = -1;
    const int mp = mode_pos();
    auto consider = [&](double val, double dir, int who) {
      // constraint val + t*dir <= 0 with val <= 0 now
      if (dir <= 1e-300) return;
      const double lim = std::max(0.0, -val) / dir;
      if (lim < tmax - 1e-15 * (1 + lim)) {
        tmax = lim;
        blocker = who;
      }
    };
    for (std::size_t p = 1; p + 1 < act_.size(); ++p) {
      const double ll = z_[act_[p]] - z_[act_[p - 1]];
      const double lr = z_[act_[p + 1]] - z_[act_[p]];
      const double sl = (u_[p] - u_[p - 1]) / ll, sr = (u_[p + 1] - u_[p]) / lr;
      const double dsl = (du[p] - du[p - 1]) / ll, dsr = (du[p + 1] - du[p]) / lr;
      if (static_cast<int>(p) == mp) {
        if (!tie_left_) consider(-sl, -dsl, -2); // need slope-left >= 0
        if (!tie_right_) consider(sr, dsr, -3);  // need slope-right <= 0
      } else {
        consider(sr - sl, dsr - dsl, static_cast<int>(p));
      }
    }
    // mode at an endpoint: one-sided cone
    if (mp == 0 && act_.size() >= 2 && !tie_right_) {
      const double lr = z_[act_[1]] - z_[act_[0]];
      consider((u_[1] - u_[0]) / lr, (du[1] - du[0]) / lr, -3);
    }
    if (mp == static_cast<int>(act_.size()) - 1 && act_.size() >= 2 && mp > 0 &&
        !tie_left_) {
      const double ll = z_[act_[mp]] - z_[act_[mp - 1]];
      consider(-(u_[mp] - u_[mp - 1]) / ll, -(du[mp] - du[mp - 1]) / ll, -2);
    }
    return tmax;
  }

  void apply_structural(int blocker) {
    if (blocker == -2) {
      tie_left_ = true;
      flatten_segment(mode_pos() - 1);
    } else if (blocker == -3) {
      tie_right_ = true;
      flatten_segment(mode_pos());
    } else if (blocker > 0 && blocker + 1 < static_cast<int>(act_.size())) {
      const std::vector<double> v = full_values();
      act_.erase(act_.begin() + blocker);
      u_.resize(act_.size());
      for (std::size_t p = 0; p < act_.size(); ++p) u_[p] = v[act_[p]];
    }
  }

  /// Snap an exactly-flat tied segment (removes the O(min_step) residue the
  /// capped line-search step leaves behind).
  void flatten_segment(int p) {
    if (p < 0 || p + 1 >= static_cast<int>(act_.size())) return;
    const double m = 0.5 * (u_[p] + u_[p + 1]);
    u_[p] = u_[p + 1] = m;
  }

  bool release_ties(const std::vector<double>& gr) {
    const int mp = mode_pos();
    if (mp < 0 || (!tie_left_ && !tie_right_)) return false;
    // KKT at the tied stationary point: the multiplier of the left-slope
    // constraint u[mp-1] - u[mp] <= 0 is gr[mp-1], of the right-slope
    // constraint u[mp+1] - u[mp] <= 0 it is gr[mp+1]; a negative multiplier
    // means the tie must be released
    bool released = false;
    if (tie_left_ && mp >= 1 && gr[mp - 1] < -1e-12) {
      tie_left_ = false;
      released = true;
    }
    if (tie_right_ && mp + 1 < static_cast<int>(act_.size()) && gr[mp + 1] < -1e-12) {
      tie_right_ = false;
      released = true;
    }
    return released;
  }

  // ---- characterization residuals on the grid -------------------------------

  struct Certificate {
    double total = 0;
    int insert_index = -1;
  };

  Certificate certificate() const {
    const std::vector<double> v = full_values();
    // fitted prefixes over the grid
    std::vector<double> F(N_, 0.0), G(N_, 0.0);
    for (int i = 0; i + 1 < N_; ++i) {
      F[i + 1] = F[i] + dz_[i] * j00(v[i], v[i + 1]);
      G[i + 1] = G[i] + dz_[i] * F[i] + dz_[i] * dz_[i] * j10(v[i], v[i + 1]);
    }
    const double mass = F[N_ - 1];

    Certificate c;
    double worst_violation = 0;
    c.total = std::abs(mass - 1.0);

    auto is_active = [&](int i) {
      return std::binary_search(act_.begin(), act_.end(), i);
    };
    auto kinked = [&](int i) {
      if (i <= 0 || i >= N_ - 1) return false;
      const double sl = (v[i] - v[i - 1]) / dz_[i - 1];
      const double sr = (v[i + 1] - v[i]) / dz_[i];
      const double vmax =
          std::max({std::abs(v[i - 1]), std::abs(v[i]), std::abs(v[i + 1])});
      const double floor = 8.0 * std::numeric_limits<double>::epsilon() *
                           (1.0 + vmax) * (1.0 / dz_[i - 1] + 1.0 / dz_[i]);
      return sl - sr >
             PwlConcave::kKinkTol * (1 + std::max(std::abs(sl), std::abs(sr))) + floor;
    };

    if (mode_ < 0) {
      // unconstrained: H(t) <= Y(t) with equality on the knot set
      std::vector<double> Y(N_, 0.0);
      for (int i = 0; i + 1 < N_; ++i) Y[i + 1] = Y[i] + cw_[i] * dz_[i];
      for (int i = 1; i < N_; ++i) {
        const double d = (G[i] - G[i1_]) - Y[i];
        if (d > worst_violation && !is_active(i) && i < N_ - 1) {
          worst_violation = d;
          if (d > 0.25 * opts_.tol_certificate) c.insert_index = i;
        }
        c.total = std::max(c.total, d);
        if (kinked(i) || i == N_ - 1) c.total = std::max(c.total, std::abs(d));
      }
      return c;
    }

    // constrained: separate left/right systems anchored at the data range
    std::vector<double> YL(N_, 0.0), YR(N_, 0.0), HL(N_, 0.0), HR(N_, 0.0);
    for (int i = i1_; i + 1 < N_; ++i) YL[i + 1] = YL[i] + cw_[i] * dz_[i];
    for (int i = in_; i-- > 0;) YR[i] = YR[i + 1] + (1.0 - cw_[i]) * dz_[i];
    for (int i = in_ + 1; i < N_; ++i) YR[i] = 0.0;
    for (int i = 0; i < N_; ++i) {
      HL[i] = G[i] - G[i1_];
      HR[i] = F[in_] * (z_[in_] - z_[i]) - (G[in_] - G[i]);
    }
    const double sl_m = (mode_ > 0) ? (v[mode_] - v[mode_ - 1]) / dz_[mode_ - 1] : 1.0;
    const double sr_m =
        (mode_ + 1 < N_) ? (v[mode_ + 1] - v[mode_]) / dz_[mode_] : -1.0;
    const double mtol = PwlConcave::kKinkTol *
                        (1 + std::max(std::abs(sl_m), std::abs(sr_m)));
    const bool lk = sl_m > mtol, rk = sr_m < -mtol;

    double best_insert = 0.25 * opts_.tol_certificate;
    for (int i = i1_; i <= mode_ && i < N_; ++i) {
      const double d = HL[i] - YL[i];
      c.total = std::max(c.total, d);
      const bool need_eq = (i > i1_) && ((i < mode_ && kinked(i)) || (i == mode_ && lk));
      if (need_eq) c.total = std::max(c.total, std::abs(d));
      if (i != mode_ && i > 0 && i < N_ - 1 && !is_active(i) && d > best_insert) {
        best_insert = d;
        c.insert_index = i;
      }
    }
    for (int i = std::max(mode_, 0); i <= in_; ++i) {
      const double d = HR[i] - YR[i];
      c.total = std::max(c.total, d);
      const bool need_eq = (i < in_) && ((i > mode_ && kinked(i)) || (i == mode_ && rk));
      if (need_eq) c.total = std::max(c.total, std::abs(d));
      if (i != mode_ && i > 0 && i < N_ - 1 && !is_active(i) && d > best_insert) {
        best_insert = d;
        c.insert_index = i;
      }
    }
    return c;
  }
};

} // namespace detail

namespace detail {

inline Fit build_fit(const std::vector<double>& z, const std::vector<double>& v,
                     const std::vector<double>& w, bool constrained,
                     std::optional<double> mode, int iters, double residual) {
  PwlConcave est(z, v);
  Fit f{std::move(est), {}, 0, 0, iters, residual, constrained, mode};
  f.knot_set.push_back(0);
  for (std::size_t i : f.estimate.kink_indices()) f.knot_set.push_back(static_cast<int>(i));
  f.knot_set.push_back(static_cast<int>(z.size()) - 1);
  std::sort(f.knot_set.begin(), f.knot_set.end());
  f.knot_set.erase(std::unique(f.knot_set.begin(), f.knot_set.end()), f.knot_set.end());
  double lin = 0;
  for (std::size_t i = 0; i < z.size(); ++i) lin += w[i] * v[i];
  f.loglik = lin;
  f.psi = lin - f.estimate.exp_integral();
  return f;
}

} // namespace detail

/// Maximize Psi_n over all concave log-densities on [X_(1), X_(n)].
inline Fit fit_unconstrained(const SortedSample& s,
                             const SolverOptions& opts = SolverOptions{}) {
  s.validate();
  opts.validate();
  detail::ConeSolver solver(s.points, s.weights, -1, opts);
  auto r = solver.solve();
  Fit f = detail::build_fit(s.points, r.v, s.weights, false, std::nullopt,
                            r.newton_iterations, r.residual);
  if (!r.converged)
    throw FitNonConvergence("unconstrained fit did not reach the certificate tolerance",
                            r.residual, std::move(f));
  return f;
}

/// Maximize Psi_n over concave log-densities whose maximum is attained at m.
inline Fit fit_constrained(const SortedSample& s, double m,
                           const SolverOptions& opts = SolverOptions{}) {
  opts.validate();
  AugmentedSample a = augment(s, m);
  detail::ConeSolver solver(a.z, a.zweights, a.mode_index, opts);
  auto r = solver.solve();
  Fit f = detail::build_fit(a.z, r.v, a.zweights, true, m, r.newton_iterations,
                            r.residual);
  if (!r.converged)
    throw FitNonConvergence("mode-constrained fit did not reach the certificate tolerance",
                            r.residual, std::move(f));
  return f;
}

/// 2 log lambda_n = 2 n P_n(phi-hat - phi-hat^0); nonnegative up to round-off.
inline double lr_statistic(const SortedSample& s, double m,
                           const SolverOptions& opts = SolverOptions{}) {
  const Fit fu = fit_unconstrained(s, opts);
  const Fit fc = fit_constrained(s, m, opts);
  return 2.0 * static_cast<double>(s.n_raw) * (fu.loglik - fc.loglik);
}

} // namespace logcave
