#pragma once

#include "phia/closed_loop.hpp"
#include "phia/sim.hpp"

#include <limits>
#include <span>
#include <vector>

namespace phia {

/// Margins and verdicts for every checkable stability condition: the uniform
/// damping bound 3 D_c3 − R_aa ≻ 0, the Schur-complement blocks D1 and D2,
/// the eigenvalue route on the symmetrized R1, and the per-sample decrease
/// bound on dW/dt along a trajectory.
struct CertificateReport {
  double assumption1_margin = std::numeric_limits<double>::quiet_NaN();
  bool assumption1_pass = false;

  double D1_margin = std::numeric_limits<double>::quiet_NaN();
  double D2_margin = std::numeric_limits<double>::quiet_NaN();
  bool schur_pass = false;

  double R1_sym_margin = std::numeric_limits<double>::quiet_NaN();
  bool eig_route_pass = false;
  bool routes_agree = true;

  long structure_samples = 0;

  bool wdot_checked = false;
  long wdot_samples = 0;
  long wdot_violations = 0;
  double wdot_worst_gap = -std::numeric_limits<double>::infinity();
  bool wdot_pass = true;

  bool all_pass() const {
    return assumption1_pass && schur_pass && eig_route_pass && routes_agree && wdot_pass;
  }
};

/// Worst-case margin of the damping bound over a set of R_aa samples:
/// min over samples of lambda_min(3 D_c3 − R_aa). The bound holds iff the
/// margin is strictly positive.
inline double check_assumption1(std::span<const Mat> raa_samples, const Mat& Dc3) {
  require(!raa_samples.empty(), ErrorCode::config, "need at least one R_aa sample");
  double margin = std::numeric_limits<double>::infinity();
  for (const Mat& raa : raa_samples) {
    require(raa.rows() == Dc3.rows() && raa.cols() == Dc3.cols(), ErrorCode::dimension,
            "R_aa sample does not match D_c3");
    margin = std::min(margin, min_symmetric_eigenvalue(3.0 * Dc3 - raa));
  }
  return margin;
}

inline double check_assumption1(const std::vector<Mat>& raa_samples, const Mat& Dc3) {
  return check_assumption1(std::span<const Mat>(raa_samples), Dc3);
}

namespace detail {

/// The damping-and-bound part of the closed-loop dissipation matrix:
///   R1 = [ R_aa+D_c3  R_au  D_c3 ]
///        [ R_auᵀ      R_uu  0    ]
///        [ R_aa       R_au  D_c3 ]
inline Mat assemble_R1(const StructureMatrices& s, const Mat& Dc3) {
  const Index m = s.m(), ss = s.s();
  Mat r = Mat::Zero(2 * m + ss, 2 * m + ss);
  r.block(0, 0, m, m) = s.Raa + Dc3;
  r.block(0, m, m, ss) = s.Rau;
  r.block(0, m + ss, m, m) = Dc3;
  r.block(m, 0, ss, m) = s.Rau.transpose();
  r.block(m, m, ss, ss) = s.Ruu;
  r.block(m + ss, 0, m, m) = s.Raa;
  r.block(m + ss, m, m, ss) = s.Rau;
  r.block(m + ss, m + ss, m, m) = Dc3;
  return r;
}

/// The controller-gain part:
///   R2 = [ D_c1+D_c2  0  D_c1 ]
///        [ 0          0  0    ]
///        [ D_c1       0  D_c1 ]
inline Mat assemble_R2(const Dimensions& dims, const RobustIAGains& g) {
  const Index m = dims.m, ss = dims.s;
  Mat r = Mat::Zero(2 * m + ss, 2 * m + ss);
  r.block(0, 0, m, m) = g.Dc1 + g.Dc2;
  r.block(0, m + ss, m, m) = g.Dc1;
  r.block(m + ss, 0, m, m) = g.Dc1;
  r.block(m + ss, m + ss, m, m) = g.Dc1;
  return r;
}

}  // namespace detail

/// Splits the robust closed-loop dissipation matrix into the two parts used
/// by the stability argument; the parts sum back to robust_R exactly.
inline std::pair<Mat, Mat> split_R(const StructureMatrices& s, const RobustIAGains& g) {
  return {detail::assemble_R1(s, g.Dc3),
          detail::assemble_R2(Dimensions{s.m(), s.s()}, g)};
}

/// Positive-semidefiniteness of R1, checked two independent ways: through the
/// Schur-complement blocks
///   D1 = R_uu − R_auᵀ (R_aa + D_c3)⁻¹ R_au,  D2 = D_c3 − ¼(R_aa + D_c3),
/// and through an eigensolve on the symmetrized ½(R1 + R1ᵀ).
struct R1PsdReport {
  Mat D1, D2;
  double D1_min_eig = 0.0;
  double D2_min_eig = 0.0;
  double R1_sym_min_eig = 0.0;
  bool schur_psd = false;
  bool eig_psd = false;
};

inline R1PsdReport check_R1_psd(const StructureMatrices& s, const Mat& Dc3, double tol = 1e-9) {
  const Mat a = s.Raa + Dc3;
  Eigen::LLT<Mat> llt(a);
  require(llt.info() == Eigen::Success, ErrorCode::config,
          "R_aa + D_c3 must be positive definite (requires R >= 0 and D_c3 > 0)");

  R1PsdReport rep;
  rep.D1 = s.Ruu - s.Rau.transpose() * llt.solve(s.Rau);
  rep.D2 = Dc3 - 0.25 * a;
  rep.D1_min_eig = min_symmetric_eigenvalue(rep.D1);
  rep.D2_min_eig = min_symmetric_eigenvalue(rep.D2);

  const Mat r1 = detail::assemble_R1(s, Dc3);
  rep.R1_sym_min_eig = min_symmetric_eigenvalue(r1);

  const double tol_schur = tol * std::max(1.0, max_abs(a));
  const double tol_eig = tol * std::max(1.0, max_abs(r1));
  rep.schur_psd = rep.D1_min_eig >= -tol_schur && rep.D2_min_eig >= -tol_schur;
  rep.eig_psd = rep.R1_sym_min_eig >= -tol_eig;
  return rep;
}

/// Analytic dW/dt and its guaranteed decrease bound at one trajectory sample.
struct WdotSample {
  double t = 0.0;
  double wdot = 0.0;
  double bound = 0.0;
  double assumption1_margin = 0.0;
  bool exceeds = false;  // wdot > bound + tol
};

struct WdotReport {
  std::vector<WdotSample> samples;
  long violations = 0;           // exceedances while the damping bound held
  double worst_gap = -std::numeric_limits<double>::infinity();
};

/// Evaluates, at every recorded sample,
///   wdot  = ∇Wᵀ (J − R) ∇W
///   bound = −‖∇_{w_a}W‖²_{D_c2} − ‖∇_{w_a}W + ∇_{w_c}W‖²_{D_c1}
/// and flags samples where wdot exceeds the bound. An exceedance counts as a
/// violation only where 3 D_c3 − R_aa ≻ 0 held, since the bound is only
/// guaranteed there.
inline WdotReport wdot_along(const Trajectory& traj, const ClosedLoopSystem& sys,
                             double tol = 1e-8) {
  require(sys.is_robust(), ErrorCode::config, "dW/dt certificate applies to the robust law");
  const RobustIAGains& g = sys.robust_gains();
  const Index m = sys.plant.dims.m;

  WdotReport rep;
  rep.samples.reserve(static_cast<size_t>(traj.samples()));
  for (Index k = 0; k < traj.samples(); ++k) {
    const PlantState x{traj.xa.row(k).transpose(), traj.xu.row(k).transpose()};
    const Vec xc = traj.xc.row(k).transpose();
    const Vec d = traj.d.row(k).transpose();
    const AugmentedState w = to_w(x, xc);
    const StructureMatrices s = sys.plant.structure(x);
    const Vec grad = grad_W(sys.plant, g, w, d);

    WdotSample smp;
    smp.t = traj.t[static_cast<size_t>(k)];
    smp.wdot = grad.dot((robust_J(s) - robust_R(s, g)) * grad);
    const Vec ga = grad.head(m);
    const Vec gac = ga + grad.tail(m);
    smp.bound = -ga.dot(g.Dc2 * ga) - gac.dot(g.Dc1 * gac);
    smp.assumption1_margin = min_symmetric_eigenvalue(3.0 * g.Dc3 - s.Raa);
    smp.exceeds = smp.wdot > smp.bound + tol;
    if (smp.exceeds && smp.assumption1_margin > 0.0) ++rep.violations;
    rep.worst_gap = std::max(rep.worst_gap, smp.wdot - smp.bound);
    rep.samples.push_back(std::move(smp));
  }
  return rep;
}

/// Output whose detectability upgrades stability to asymptotic stability:
///   y_d = (∇_{x_a}H, K_i(x_a − x_c) + (D_c1+D_c3)⁻¹ d);
/// vanishes exactly at the closed-loop equilibrium.
inline Vec detectability_output(const PhPlant& p, const RobustIAGains& g, const PlantState& x,
                                const ControllerState& xc, const Vec& d) {
  const Vec grad = grad_W(p, g, to_w(x, xc), d);
  const Index m = p.dims.m;
  Vec yd(2 * m);
  yd << grad.head(m), grad.tail(m);
  return yd;
}

/// Control and integrator rate restricted to the set y_d = 0 (caller asserts
/// the restriction): there the law reduces to u = d, ẋ_c = J_au ∇_{x_u}H,
/// recovering the undisturbed zero dynamics.
inline std::pair<Vec, Vec> restricted_control_on_yd_zero(const PhPlant& p,
                                                         const RobustIAGains& g,
                                                         const PlantState& x,
                                                         const ControllerState& xc,
                                                         const Vec& d) {
  (void)g;
  (void)xc;
  const GradH gh = p.grad_hamiltonian(x);
  const StructureMatrices s = p.structure(x);
  return {d, Vec(s.Jau * gh.u)};
}

}  // namespace phia
