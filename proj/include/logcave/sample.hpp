#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "logcave/errors.hpp"

namespace logcave {

/// Weighted, strictly increasing observation grid with total weight 1.
/// Tied raw observations are collapsed into weights; n_raw keeps the original
/// count for the 1/n touching bounds and the n in rate laws.
struct SortedSample {
  std::vector<double> points;
  std::vector<double> weights;
  long n_raw = 0;

  std::size_t size() const { return points.size(); }
  double min() const { return points.front(); }
  double max() const { return points.back(); }

  double mean() const {
    double m = 0;
    for (std::size_t i = 0; i < points.size(); ++i) m += weights[i] * points[i];
    return m;
  }

  double variance() const {
    const double m = mean();
    double v = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = points[i] - m;
      v += weights[i] * d * d;
    }
    return v;
  }

  /// Right-continuous empirical CDF value at t.
  double ecdf(double t) const {
    auto it = std::upper_bound(points.begin(), points.end(), t);
    double s = 0;
    for (auto p = points.begin(); p != it; ++p) s += weights[p - points.begin()];
    return s;
  }

  void validate() const {
    if (points.size() < 2)
      throw DegenerateSampleError("sample needs at least two distinct points");
    if (points.size() != weights.size())
      throw std::invalid_argument("points/weights size mismatch");
    double tot = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!std::isfinite(points[i]))
        throw std::invalid_argument("non-finite sample point");
      if (!(weights[i] > 0)) throw std::invalid_argument("weights must be > 0");
      if (i > 0 && !(points[i] > points[i - 1]))
        throw std::invalid_argument("points must be strictly increasing");
      tot += weights[i];
    }
    if (std::abs(tot - 1.0) > 1e-12)
      throw std::invalid_argument("weights must sum to 1");
    if (n_raw < 2) throw std::invalid_argument("n_raw must be >= 2");
  }

  /// Build from raw observations: sort, collapse exact ties into weights.
  static SortedSample from_raw(std::vector<double> raw) {
    if (raw.size() < 2)
      throw DegenerateSampleError("sample needs at least two observations");
    for (double x : raw)
      if (!std::isfinite(x)) throw std::invalid_argument("non-finite observation");
    std::sort(raw.begin(), raw.end());
    SortedSample s;
    s.n_raw = static_cast<long>(raw.size());
    const double unit = 1.0 / static_cast<double>(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
      std::size_t j = i;
      while (j < raw.size() && raw[j] == raw[i]) ++j;
      s.points.push_back(raw[i]);
      s.weights.push_back(unit * static_cast<double>(j - i));
      i = j;
    }
    if (s.points.size() < 2)
      throw DegenerateSampleError("sample needs at least two distinct points");
    // remove the rounding drift so the invariant holds exactly
    double tot = 0;
    for (double w : s.weights) tot += w;
    for (double& w : s.weights) w /= tot;
    return s;
  }
};

/// Mode-augmented grid Z_1,...,Z_N: the sorted union of the sample and m.
struct AugmentedSample {
  SortedSample base;
  double m = 0;
  std::vector<double> z;
  std::vector<double> zweights; // weight of each Z_i (0 at m when not a datum)
  int mode_index = -1;
  bool mode_is_datum = false;

  int n() const { return static_cast<int>(z.size()); }
};

/// Insert m into the grid.  Equality with a data point is exact floating
/// equality; a near-coincident m just inserts a duplicate-capacity knot.
inline AugmentedSample augment(const SortedSample& s, double m) {
  s.validate();
  if (!std::isfinite(m)) throw std::invalid_argument("mode must be finite");
  AugmentedSample a;
  a.base = s;
  a.m = m;
  auto it = std::lower_bound(s.points.begin(), s.points.end(), m);
  if (it != s.points.end() && *it == m) {
    a.z = s.points;
    a.zweights = s.weights;
    a.mode_index = static_cast<int>(it - s.points.begin());
    a.mode_is_datum = true;
    return a;
  }
  const std::size_t k = static_cast<std::size_t>(it - s.points.begin());
  a.z.reserve(s.points.size() + 1);
  a.zweights.reserve(s.points.size() + 1);
  for (std::size_t i = 0; i < k; ++i) {
    a.z.push_back(s.points[i]);
    a.zweights.push_back(s.weights[i]);
  }
  a.z.push_back(m);
  a.zweights.push_back(0.0);
  for (std::size_t i = k; i < s.points.size(); ++i) {
    a.z.push_back(s.points[i]);
    a.zweights.push_back(s.weights[i]);
  }
  a.mode_index = static_cast<int>(k);
  a.mode_is_datum = false;
  return a;
}

} // namespace logcave
