#pragma once

#include "phia/types.hpp"

#include <algorithm>
#include <cmath>

namespace phia {

inline bool all_finite(const Mat& a) { return a.allFinite(); }

inline double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

/// max |A + Aᵀ| entry, zero for a perfectly skew-symmetric matrix.
inline double skew_residual(const Mat& a) { return max_abs(a + a.transpose()); }

/// max |A − Aᵀ| entry, zero for a perfectly symmetric matrix.
inline double sym_residual(const Mat& a) { return max_abs(a - a.transpose()); }

/// Smallest eigenvalue of the symmetric part ½(A + Aᵀ).
inline double min_symmetric_eigenvalue(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorCode::numeric, "symmetric eigensolver failed");
  return es.eigenvalues().minCoeff();
}

/// Solve A x = b for symmetric positive definite A (Cholesky, no explicit inverse).
inline Vec spd_solve(const Mat& a, const Vec& b) {
  Eigen::LLT<Mat> llt(a);
  require(llt.info() == Eigen::Success, ErrorCode::config,
          "matrix is not positive definite in a context that requires it");
  return llt.solve(b);
}

inline Mat spd_solve(const Mat& a, const Mat& b) {
  Eigen::LLT<Mat> llt(a);
  require(llt.info() == Eigen::Success, ErrorCode::config,
          "matrix is not positive definite in a context that requires it");
  return llt.solve(b);
}

/// Central-difference gradient of a scalar field, used as an oracle against
/// analytic gradients.
template <class F>
Vec central_gradient(F&& f, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  Vec xp = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    xp(i) = xi + h;
    const double fp = f(xp);
    xp(i) = xi - h;
    const double fm = f(xp);
    xp(i) = xi;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace phia
