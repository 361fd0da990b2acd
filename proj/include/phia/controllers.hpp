#pragma once

#include "phia/numerics.hpp"
#include "phia/plant.hpp"
#include "phia/types.hpp"

namespace phia {

/// Tuning matrices of the damping-robust integral-action law. All four must
/// be symmetric positive definite; K_i symmetric so that ½‖w_c‖²_{K_i} is a
/// well-defined quadratic form with gradient K_i w_c.
struct RobustIAGains {
  Mat Ki, Dc1, Dc2, Dc3;
};

/// Tuning matrices of the damping-aware (legacy) integral-action law:
/// K_i ≻ 0, J_c1 skew, R_c1 ≻ 0, R_c2 ⪰ 0.
struct LegacyIAGains {
  Mat Ki, Jc1, Rc1, Rc2;
};

namespace detail {

inline void push_sym_pd(ValidationReport& rep, const std::string& name, const Mat& m,
                        double strict_tol, bool strict = true) {
  const double res = sym_residual(m);
  const double eig = min_symmetric_eigenvalue(m);
  rep.checks.push_back({name + "_sym", res <= 1e-12 * std::max(1.0, max_abs(m)), res});
  rep.checks.push_back({name + (strict ? "_pd" : "_psd"),
                        strict ? eig > strict_tol : eig >= -strict_tol, eig});
}

}  // namespace detail

/// Per-condition margins for the robust gains. Positive definiteness is
/// strict: margin must exceed strict_tol.
inline ValidationReport validate_gains(const RobustIAGains& g, double strict_tol = 1e-10) {
  ValidationReport rep;
  detail::push_sym_pd(rep, "Ki", g.Ki, strict_tol);
  detail::push_sym_pd(rep, "Dc1", g.Dc1, strict_tol);
  detail::push_sym_pd(rep, "Dc2", g.Dc2, strict_tol);
  detail::push_sym_pd(rep, "Dc3", g.Dc3, strict_tol);
  return rep;
}

inline ValidationReport validate_gains(const LegacyIAGains& g, double strict_tol = 1e-10) {
  ValidationReport rep;
  detail::push_sym_pd(rep, "Ki", g.Ki, strict_tol);
  const double skew_res = skew_residual(g.Jc1);
  rep.checks.push_back(
      {"Jc1_skew", skew_res <= 1e-12 * std::max(1.0, max_abs(g.Jc1)), skew_res});
  detail::push_sym_pd(rep, "Rc1", g.Rc1, strict_tol);
  detail::push_sym_pd(rep, "Rc2", g.Rc2, strict_tol, /*strict=*/false);
  return rep;
}

namespace detail {

inline void check_law_dims(const PhPlant& p, const Mat& probe, const PlantState& x,
                           const Vec& xc) {
  require(probe.rows() == p.dims.m && probe.cols() == p.dims.m, ErrorCode::dimension,
          "gain matrices must be m x m");
  require(x.a.size() == p.dims.m && x.u.size() == p.dims.s, ErrorCode::dimension,
          "plant state has wrong block sizes");
  require(xc.size() == p.dims.m, ErrorCode::dimension, "controller state must have length m");
}

}  // namespace detail

/// Damping-robust integral-action control:
///   u = −(J_aa + D_c1 + D_c2 + D_c3) ∇_{x_a}H − (D_c1 + D_c3) K_i (x_a − x_c).
/// Reads only the J blocks of the plant structure; the damping R(x) never
/// enters, which is the robustness property the law is built around.
inline Vec robust_ia_control(const PhPlant& p, const RobustIAGains& g, const PlantState& x,
                             const ControllerState& xc) {
  detail::check_law_dims(p, g.Ki, x, xc);
  const GradH gh = p.grad_hamiltonian(x);
  const StructureMatrices s = p.structure(x);
  return -(s.Jaa + g.Dc1 + g.Dc2 + g.Dc3) * gh.a - (g.Dc1 + g.Dc3) * (g.Ki * (x.a - xc));
}

/// Integrator dynamics of the robust law:
///   ẋ_c = −(D_c2 + D_c3) ∇_{x_a}H + J_au ∇_{x_u}H.
inline Vec robust_ia_controller_dynamics(const PhPlant& p, const RobustIAGains& g,
                                         const PlantState& x, const ControllerState& xc) {
  detail::check_law_dims(p, g.Ki, x, xc);
  const GradH gh = p.grad_hamiltonian(x);
  const StructureMatrices s = p.structure(x);
  return -(g.Dc2 + g.Dc3) * gh.a + s.Jau * gh.u;
}

/// Damping-aware integral-action control; consumes R_aa and R_au of the
/// plant, so it requires the physical damping to be known:
///   u = (−J_aa + R_aa + J_c1 − R_c1 − R_c2) ∇_{x_a}H
///       + (J_c1 − R_c1) K_i (x_a − x_c) + 2 R_au ∇_{x_u}H.
inline Vec legacy_ia_control(const PhPlant& p, const LegacyIAGains& g, const PlantState& x,
                             const ControllerState& xc) {
  detail::check_law_dims(p, g.Ki, x, xc);
  const GradH gh = p.grad_hamiltonian(x);
  const StructureMatrices s = p.structure(x);
  return (-s.Jaa + s.Raa + g.Jc1 - g.Rc1 - g.Rc2) * gh.a +
         (g.Jc1 - g.Rc1) * (g.Ki * (x.a - xc)) + 2.0 * s.Rau * gh.u;
}

/// Integrator dynamics of the legacy law:
///   ẋ_c = −R_c2 ∇_{x_a}H + (J_au + R_au) ∇_{x_u}H.
inline Vec legacy_ia_controller_dynamics(const PhPlant& p, const LegacyIAGains& g,
                                         const PlantState& x, const ControllerState& xc) {
  detail::check_law_dims(p, g.Ki, x, xc);
  const GradH gh = p.grad_hamiltonian(x);
  const StructureMatrices s = p.structure(x);
  return -g.Rc2 * gh.a + (s.Jau + s.Rau) * gh.u;
}

}  // namespace phia
