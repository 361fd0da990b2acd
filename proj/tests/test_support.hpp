#pragma once

#include "phia/closed_loop.hpp"
#include "phia/quadratic.hpp"

#include <random>

namespace phia::test {

inline Mat random_matrix(std::mt19937& rng, Index r, Index c, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Mat m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = dist(rng);
  return m;
}

inline Vec random_vec(std::mt19937& rng, Index n, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

inline Mat random_spd(std::mt19937& rng, Index n, double eps = 0.1) {
  const Mat g = random_matrix(rng, n, n);
  return Mat(g.transpose() * g / static_cast<double>(n) + eps * Mat::Identity(n, n));
}

inline Mat random_psd(std::mt19937& rng, Index n) {
  const Mat g = random_matrix(rng, n, n);
  return Mat(g.transpose() * g / static_cast<double>(std::max<Index>(n, 1)));
}

inline Mat random_skew(std::mt19937& rng, Index n) {
  const Mat g = random_matrix(rng, n, n);
  return Mat(0.5 * (g - g.transpose()));
}

inline PlantState random_state(std::mt19937& rng, const Dimensions& d, double scale = 1.0) {
  return {random_vec(rng, d.m, scale), random_vec(rng, d.s, scale)};
}

/// Random linear pH plant with quadratic energy; the assembled R is PSD by
/// construction (slice of a Gram matrix).
inline PhPlant random_quadratic_plant(std::mt19937& rng, Index m, Index s, bool damped = true) {
  QuadraticPlantParams prm;
  prm.dims = {m, s};
  prm.Q = random_spd(rng, m + s);
  prm.Jaa = random_skew(rng, m);
  prm.Jau = random_matrix(rng, m, s);
  prm.Juu = random_skew(rng, s);
  if (damped) {
    const Mat r = random_psd(rng, m + s);
    prm.Raa = r.topLeftCorner(m, m);
    prm.Rau = r.topRightCorner(m, s);
    prm.Ruu = r.bottomRightCorner(s, s);
  }
  prm.xa_star = random_vec(rng, m);
  prm.xu_star = random_vec(rng, s);
  return build_quadratic_plant(prm);
}

inline RobustIAGains random_robust_gains(std::mt19937& rng, Index m) {
  return {random_spd(rng, m), random_spd(rng, m), random_spd(rng, m), random_spd(rng, m)};
}

inline LegacyIAGains random_legacy_gains(std::mt19937& rng, Index m) {
  return {random_spd(rng, m), random_skew(rng, m), random_spd(rng, m), random_psd(rng, m)};
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Vector with entries on the dyadic grid k/1024, |k| <= 1024; sums and
/// differences of such values are exact in double precision.
inline Vec random_dyadic_vec(std::mt19937& rng, Index n) {
  std::uniform_int_distribution<int> dist(-1024, 1024);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = static_cast<double>(dist(rng)) / 1024.0;
  return v;
}

}  // namespace phia::test
