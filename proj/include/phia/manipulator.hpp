#pragma once

#include "phia/plant.hpp"

#include <cmath>

namespace phia {

/// Sign convention for the joint-friction damping matrix. `psd` is the
/// dissipative form (R(x) stays positive semidefinite); `negated` flips the
/// sign of every entry and is kept for cross-checking against sources that
/// use the opposite damping sign convention. With the negated form the
/// assembled R is indefinite at low joint speeds, which validate_structure
/// reports honestly.
enum class FrictionSign { psd, negated };

/// Planar 2-link manipulator under energy-shaping + damping-injection
/// control, with smooth Coulomb-like joint friction. State partition:
/// x_a = p (momenta, the actuated channel), x_u = q (joint angles).
struct ManipulatorParams {
  double a1 = 0.1476;  // inertia constants [kg m^2]
  double a2 = 0.0725;
  double b = 0.0858;
  double alpha1 = 0.1;  // friction smoothing
  double alpha2 = 0.1;
  double beta1 = 2.0;  // friction magnitudes
  double beta2 = 2.0;
  Eigen::Matrix2d Kd = Eigen::Matrix2d{{5.0, 0.0}, {0.0, 5.0}};
  Eigen::Matrix2d Kp = Eigen::Matrix2d{{30.0, 0.0}, {0.0, 20.0}};
  Eigen::Vector2d qd = Eigen::Vector2d{20.0, 20.0};
  FrictionSign friction_sign = FrictionSign::psd;

  void validate() const {
    require(a1 > 0 && a2 > 0 && a1 * a2 > b * b, ErrorCode::config,
            "need a1 > 0, a2 > 0 and a1*a2 > b^2 so the mass matrix stays positive definite");
    require(alpha1 > 0 && alpha2 > 0 && beta1 >= 0 && beta2 >= 0, ErrorCode::config,
            "friction constants must satisfy alpha > 0, beta >= 0");
    require(min_symmetric_eigenvalue(Kd) > 0 && min_symmetric_eigenvalue(Kp) > 0,
            ErrorCode::config, "Kd and Kp must be positive definite");
  }
};

/// M(q) = [ a1+a2+2b cos(th2)  a2+b cos(th2) ; a2+b cos(th2)  a2 ];
/// det M = a1 a2 − b² cos²(th2) > 0 for all q when a1 a2 > b².
inline Eigen::Matrix2d mass_matrix(const ManipulatorParams& prm, const Eigen::Vector2d& q) {
  const double c = std::cos(q(1));
  Eigen::Matrix2d m;
  m << prm.a1 + prm.a2 + 2.0 * prm.b * c, prm.a2 + prm.b * c, prm.a2 + prm.b * c, prm.a2;
  return m;
}

/// Shaped energy H(q, p) = ½ pᵀ M(q)⁻¹ p + ½ (q − q_d)ᵀ K_p (q − q_d);
/// global minimum 0 at (q_d, 0).
inline double manipulator_hamiltonian(const ManipulatorParams& prm, const Eigen::Vector2d& q,
                                      const Eigen::Vector2d& p) {
  const Eigen::Vector2d qdot = mass_matrix(prm, q).llt().solve(p);
  const Eigen::Vector2d e = q - prm.qd;
  return 0.5 * p.dot(qdot) + 0.5 * e.dot(prm.Kp * e);
}

struct ManipulatorGrad {
  Eigen::Vector2d dp;  // ∇_p H = M⁻¹ p = q̇
  Eigen::Vector2d dq;
};

/// Analytic gradient. Only th2 enters M, through ∂M/∂th2 = −b sin(th2)
/// [[2,1],[1,0]], so the kinetic part of ∇_q H has a single nonzero
/// component: ½ pᵀ (∂M⁻¹/∂th2) p = −½ q̇ᵀ (∂M/∂th2) q̇.
inline ManipulatorGrad manipulator_grad(const ManipulatorParams& prm, const Eigen::Vector2d& q,
                                        const Eigen::Vector2d& p) {
  ManipulatorGrad g;
  const Eigen::Vector2d qdot = mass_matrix(prm, q).llt().solve(p);
  g.dp = qdot;
  g.dq = prm.Kp * (q - prm.qd);
  Eigen::Matrix2d dm;
  dm << 2.0, 1.0, 1.0, 0.0;
  dm *= -prm.b * std::sin(q(1));
  g.dq(1) += -0.5 * qdot.dot(dm * qdot);
  return g;
}

/// Smooth Coulomb friction coefficients d1 = beta1/sqrt(alpha1 + q̇1²),
/// d2 = beta2/sqrt(alpha2 + (q̇1 − q̇2)²), assembled as the joint damping
///   D_p = [ d1+d2  −d2 ; −d2  d2 ]
/// (dissipative convention; trace d1+2d2 >= 0 and det d1 d2 >= 0, so PSD).
inline Eigen::Matrix2d friction_matrix(const ManipulatorParams& prm,
                                       const Eigen::Vector2d& qdot) {
  const double d1 = prm.beta1 / std::sqrt(prm.alpha1 + qdot(0) * qdot(0));
  const double rel = qdot(0) - qdot(1);
  const double d2 = prm.beta2 / std::sqrt(prm.alpha2 + rel * rel);
  Eigen::Matrix2d dp;
  dp << d1 + d2, -d2, -d2, d2;
  if (prm.friction_sign == FrictionSign::negated) dp = -dp;
  return dp;
}

/// Constant bound built from the friction suprema d̄_i = beta_i/sqrt(alpha_i)
/// in the dissipative convention. Dominates friction_matrix for every q̇:
/// the difference has the same structural form with nonnegative coefficients.
inline Eigen::Matrix2d friction_bound_supremum(const ManipulatorParams& prm) {
  const double d1 = prm.beta1 / std::sqrt(prm.alpha1);
  const double d2 = prm.beta2 / std::sqrt(prm.alpha2);
  Eigen::Matrix2d dbar;
  dbar << d1 + d2, -d2, -d2, d2;
  return dbar;
}

/// Alternative bound convention d̄_i = alpha_i/beta_i with negated-diagonal
/// sign pattern. Kept runnable for comparison even though it does not
/// dominate the friction coefficients; certificate margins report the
/// consequences honestly.
inline Eigen::Matrix2d friction_bound_alpha_over_beta(const ManipulatorParams& prm) {
  require(prm.beta1 != 0.0 && prm.beta2 != 0.0, ErrorCode::numeric,
          "alpha/beta friction bound is undefined when beta is zero");
  const double d1 = prm.alpha1 / prm.beta1;
  const double d2 = prm.alpha2 / prm.beta2;
  Eigen::Matrix2d dbar;
  dbar << -d1 - d2, d2, d2, -d2;
  return dbar;
}

struct FrictionBounds {
  Eigen::Matrix2d supremum;
  Eigen::Matrix2d alpha_over_beta;
};

inline FrictionBounds friction_bound(const ManipulatorParams& prm) {
  return {friction_bound_supremum(prm), friction_bound_alpha_over_beta(prm)};
}

/// Packages the manipulator as a partitioned pH plant:
/// J_aa = 0, J_au = −I, J_uu = 0, R_aa = K_d + D_p(q̇), R_au = R_uu = 0,
/// x* = (p, q) = (0, q_d).
inline PhPlant build_plant(const ManipulatorParams& prm) {
  prm.validate();
  PhPlant plant;
  plant.dims = {2, 2};
  plant.hamiltonian = [prm](const PlantState& x) {
    return manipulator_hamiltonian(prm, x.u, x.a);
  };
  plant.grad_hamiltonian = [prm](const PlantState& x) {
    const ManipulatorGrad g = manipulator_grad(prm, x.u, x.a);
    return GradH{g.dp, g.dq};
  };
  plant.structure = [prm](const PlantState& x) {
    StructureMatrices s;
    s.Jaa = Mat::Zero(2, 2);
    s.Jau = -Mat::Identity(2, 2);
    s.Juu = Mat::Zero(2, 2);
    const Eigen::Vector2d qdot = mass_matrix(prm, x.u).llt().solve(Eigen::Vector2d(x.a));
    s.Raa = prm.Kd + friction_matrix(prm, qdot);
    s.Rau = Mat::Zero(2, 2);
    s.Ruu = Mat::Zero(2, 2);
    return s;
  };
  plant.x_star = {Vec::Zero(2), prm.qd};
  return plant;
}

}  // namespace phia
