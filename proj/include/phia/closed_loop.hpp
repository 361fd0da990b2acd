#pragma once

#include "phia/controllers.hpp"
#include "phia/numerics.hpp"
#include "phia/plant.hpp"

#include <variant>

namespace phia {

/// Augmented coordinates w = (w_a, w_u, w_c) = (x_a, x_u, x_a − x_c).
struct AugmentedState {
  Vec wa, wu, wc;

  Vec stacked() const {
    Vec w(wa.size() + wu.size() + wc.size());
    w << wa, wu, wc;
    return w;
  }
};

inline AugmentedState to_w(const PlantState& x, const ControllerState& xc) {
  return {x.a, x.u, x.a - xc};
}

inline std::pair<PlantState, ControllerState> from_w(const AugmentedState& w) {
  return {PlantState{w.wa, w.wu}, Vec(w.wa - w.wc)};
}

using ControlLaw = std::variant<RobustIAGains, LegacyIAGains>;

/// Plant + integral-action law + disturbance schedule. Validates gain
/// conditions, dimension agreement, and that x_star is a critical point of H
/// at construction; immutable afterwards.
struct ClosedLoopSystem {
  PhPlant plant;
  ControlLaw law;
  DisturbanceSignal disturbance;

  ClosedLoopSystem(PhPlant p, ControlLaw l, DisturbanceSignal d)
      : plant(std::move(p)), law(std::move(l)), disturbance(std::move(d)) {
    require(plant.dims.valid(), ErrorCode::dimension, "plant dimensions invalid (need m >= 1)");
    disturbance.validate();
    require(disturbance.m == plant.dims.m, ErrorCode::dimension,
            "disturbance dimension does not match the plant");
    const ValidationReport rep = std::visit([](const auto& g) { return validate_gains(g); }, law);
    if (!rep.all_pass()) {
      std::string detail;
      for (const auto& c : rep.checks)
        if (!c.pass) detail += " " + c.name;
      throw Error(ErrorCode::config, "gain validation failed:" + detail);
    }
    const Index m = plant.dims.m;
    const bool dims_ok = std::visit(
        [m](const auto& g) {
          return g.Ki.rows() == m && g.Ki.cols() == m;
        },
        law);
    require(dims_ok, ErrorCode::dimension, "gain matrices do not match the plant dimension");
    require(x_star_grad_norm() <= 1e-8, ErrorCode::config,
            "x_star is not a critical point of the Hamiltonian");
  }

  bool is_robust() const { return std::holds_alternative<RobustIAGains>(law); }
  const RobustIAGains& robust_gains() const { return std::get<RobustIAGains>(law); }
  const LegacyIAGains& legacy_gains() const { return std::get<LegacyIAGains>(law); }

 private:
  double x_star_grad_norm() const {
    const GradH g = plant.grad_hamiltonian(plant.x_star);
    double n = 0.0;
    if (g.a.size() > 0) n = std::max(n, g.a.cwiseAbs().maxCoeff());
    if (g.u.size() > 0) n = std::max(n, g.u.cwiseAbs().maxCoeff());
    return n;
  }
};

/// Interconnection matrix of the robust closed loop in w-coordinates:
///   [ 0      J_au  0 ]
///   [ −J_auᵀ J_uu  0 ]
///   [ 0      0     0 ]
inline Mat robust_J(const StructureMatrices& s) {
  const Index m = s.m(), ss = s.s();
  Mat j = Mat::Zero(2 * m + ss, 2 * m + ss);
  j.block(0, m, m, ss) = s.Jau;
  j.block(m, 0, ss, m) = -s.Jau.transpose();
  j.block(m, m, ss, ss) = s.Juu;
  return j;
}

/// Dissipation-like matrix of the robust closed loop (not symmetric):
///   [ R_aa+D_c1+D_c2+D_c3  R_au  D_c1+D_c3 ]
///   [ R_auᵀ                R_uu  0         ]
///   [ R_aa+D_c1            R_au  D_c1+D_c3 ]
inline Mat robust_R(const StructureMatrices& s, const RobustIAGains& g) {
  const Index m = s.m(), ss = s.s();
  Mat r = Mat::Zero(2 * m + ss, 2 * m + ss);
  // grouped so that the two-part split of this matrix reconstructs it exactly
  r.block(0, 0, m, m) = (s.Raa + g.Dc3) + (g.Dc1 + g.Dc2);
  r.block(0, m, m, ss) = s.Rau;
  r.block(0, m + ss, m, m) = g.Dc1 + g.Dc3;
  r.block(m, 0, ss, m) = s.Rau.transpose();
  r.block(m, m, ss, ss) = s.Ruu;
  r.block(m + ss, 0, m, m) = s.Raa + g.Dc1;
  r.block(m + ss, m, m, ss) = s.Rau;
  r.block(m + ss, m + ss, m, m) = g.Dc1 + g.Dc3;
  return r;
}

/// Interconnection matrix of the legacy closed loop in w-coordinates.
inline Mat legacy_Jcl(const StructureMatrices& s, const LegacyIAGains& g) {
  const Index m = s.m(), ss = s.s();
  Mat j = Mat::Zero(2 * m + ss, 2 * m + ss);
  j.block(0, 0, m, m) = g.Jc1;
  j.block(0, m, m, ss) = s.Jau + s.Rau;
  j.block(0, m + ss, m, m) = g.Jc1;
  j.block(m, 0, ss, m) = -s.Jau.transpose() - s.Rau.transpose();
  j.block(m, m, ss, ss) = s.Juu;
  j.block(m + ss, 0, m, m) = g.Jc1;
  j.block(m + ss, m + ss, m, m) = g.Jc1;
  return j;
}

/// Damping matrix of the legacy closed loop in w-coordinates.
inline Mat legacy_Rcl(const StructureMatrices& s, const LegacyIAGains& g) {
  const Index m = s.m(), ss = s.s();
  Mat r = Mat::Zero(2 * m + ss, 2 * m + ss);
  r.block(0, 0, m, m) = g.Rc1 + g.Rc2;
  r.block(0, m + ss, m, m) = g.Rc1;
  r.block(m, m, ss, ss) = s.Ruu;
  r.block(m + ss, 0, m, m) = g.Rc1;
  r.block(m + ss, m + ss, m, m) = g.Rc1;
  return r;
}

/// Closed-loop Hamiltonian H_cl(w) = H(w_a, w_u) + ½‖w_c‖²_{K_i}.
inline double hamiltonian_cl(const PhPlant& p, const Mat& Ki, const AugmentedState& w) {
  return p.hamiltonian({w.wa, w.wu}) + 0.5 * w.wc.dot(Ki * w.wc);
}

inline double hamiltonian_cl(const PhPlant& p, const RobustIAGains& g, const AugmentedState& w) {
  return hamiltonian_cl(p, g.Ki, w);
}

inline double hamiltonian_cl(const PhPlant& p, const LegacyIAGains& g, const AugmentedState& w) {
  return hamiltonian_cl(p, g.Ki, w);
}

/// Lyapunov function of the legacy closed loop under constant disturbance d:
///   W_l = H + ½‖w_c − K_i⁻¹ R_c1⁻¹ d‖²_{K_i}.
inline double lyapunov_Wl(const PhPlant& p, const LegacyIAGains& g, const AugmentedState& w,
                          const Vec& d) {
  const Vec shift = spd_solve(g.Ki, spd_solve(g.Rc1, d));
  const Vec v = w.wc - shift;
  return p.hamiltonian({w.wa, w.wu}) + 0.5 * v.dot(g.Ki * v);
}

/// Lyapunov function of the robust closed loop under constant disturbance d:
///   W = H + ½‖w_c + K_i⁻¹ (D_c1+D_c3)⁻¹ d‖²_{K_i}.
inline double lyapunov_W(const PhPlant& p, const RobustIAGains& g, const AugmentedState& w,
                         const Vec& d) {
  const Vec shift = spd_solve(g.Ki, spd_solve(g.Dc1 + g.Dc3, d));
  const Vec v = w.wc + shift;
  return p.hamiltonian({w.wa, w.wu}) + 0.5 * v.dot(g.Ki * v);
}

/// ∇W stacked as (∇_{x_a}H, ∇_{x_u}H, K_i(x_a − x_c) + (D_c1+D_c3)⁻¹ d).
inline Vec grad_W(const PhPlant& p, const RobustIAGains& g, const AugmentedState& w,
                  const Vec& d) {
  const GradH gh = p.grad_hamiltonian({w.wa, w.wu});
  const Vec gc = g.Ki * w.wc + spd_solve(g.Dc1 + g.Dc3, d);
  Vec out(gh.a.size() + gh.u.size() + gc.size());
  out << gh.a, gh.u, gc;
  return out;
}

/// Closed-loop equilibrium w* = (x_a*, x_u*, −K_i⁻¹ (D_c1+D_c3)⁻¹ d).
inline AugmentedState equilibrium(const PhPlant& p, const RobustIAGains& g, const Vec& d) {
  require(d.size() == p.dims.m, ErrorCode::dimension, "disturbance must have length m");
  Vec wc_star = -spd_solve(g.Ki, spd_solve(g.Dc1 + g.Dc3, d));
  return {p.x_star.a, p.x_star.u, std::move(wc_star)};
}

/// Closed-loop field by direct substitution: plant dynamics with u from the
/// active law, stacked with the integrator dynamics. Returns (ẋ_a, ẋ_u, ẋ_c).
inline Vec field_direct_d(const ClosedLoopSystem& sys, const PlantState& x,
                          const ControllerState& xc, const Vec& d) {
  Vec u, xc_dot;
  if (sys.is_robust()) {
    u = robust_ia_control(sys.plant, sys.robust_gains(), x, xc);
    xc_dot = robust_ia_controller_dynamics(sys.plant, sys.robust_gains(), x, xc);
  } else {
    u = legacy_ia_control(sys.plant, sys.legacy_gains(), x, xc);
    xc_dot = legacy_ia_controller_dynamics(sys.plant, sys.legacy_gains(), x, xc);
  }
  const auto [xa_dot, xu_dot] = plant_vector_field(sys.plant, x, u, d);
  Vec out(xa_dot.size() + xu_dot.size() + xc_dot.size());
  out << xa_dot, xu_dot, xc_dot;
  return out;
}

inline Vec field_direct(const ClosedLoopSystem& sys, const PlantState& x,
                        const ControllerState& xc, double t) {
  return field_direct_d(sys, x, xc, sys.disturbance.value_at(t));
}

/// Closed-loop field in structured port-Hamiltonian form. For the robust law
/// this is [J(x) − R(x)] ∇W with the disturbance absorbed into ∇W; for the
/// legacy law it is [J_cl − R_cl] ∇H_cl − (d, 0, d). Returns ẇ.
inline Vec field_structured_d(const ClosedLoopSystem& sys, const AugmentedState& w,
                              const Vec& d) {
  const StructureMatrices s = sys.plant.structure({w.wa, w.wu});
  if (sys.is_robust()) {
    const RobustIAGains& g = sys.robust_gains();
    const Vec grad = grad_W(sys.plant, g, w, d);
    return (robust_J(s) - robust_R(s, g)) * grad;
  }
  const LegacyIAGains& g = sys.legacy_gains();
  const GradH gh = sys.plant.grad_hamiltonian({w.wa, w.wu});
  Vec grad(gh.a.size() + gh.u.size() + w.wc.size());
  grad << gh.a, gh.u, g.Ki * w.wc;
  Vec out = (legacy_Jcl(s, g) - legacy_Rcl(s, g)) * grad;
  out.head(s.m()) -= d;
  out.tail(s.m()) -= d;
  return out;
}

inline Vec field_structured(const ClosedLoopSystem& sys, const AugmentedState& w, double t) {
  return field_structured_d(sys, w, sys.disturbance.value_at(t));
}

}  // namespace phia
