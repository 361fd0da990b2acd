#pragma once

#include "phia/numerics.hpp"
#include "phia/types.hpp"

#include <functional>
#include <limits>
#include <utility>

namespace phia {

/// Partitioned plant state x = (x_a, x_u).
struct PlantState {
  Vec a;
  Vec u;
};

using ControllerState = Vec;

/// Gradient of the Hamiltonian split along the state partition.
struct GradH {
  Vec a;
  Vec u;
};

/// Interconnection/damping blocks evaluated at one state.
///
/// The assembled matrices are
///   J = [ J_aa  J_au ]      R = [ R_aa  R_au ]
///       [-J_auᵀ J_uu ]          [ R_auᵀ R_uu ]
/// with J skew-symmetric and R symmetric positive semidefinite.
struct StructureMatrices {
  Mat Jaa, Jau, Juu;
  Mat Raa, Rau, Ruu;

  Index m() const { return Jaa.rows(); }
  Index s() const { return Juu.rows(); }

  Mat assemble_J() const {
    Mat j(m() + s(), m() + s());
    j.topLeftCorner(m(), m()) = Jaa;
    j.topRightCorner(m(), s()) = Jau;
    j.bottomLeftCorner(s(), m()) = -Jau.transpose();
    j.bottomRightCorner(s(), s()) = Juu;
    return j;
  }

  Mat assemble_R() const {
    Mat r(m() + s(), m() + s());
    r.topLeftCorner(m(), m()) = Raa;
    r.topRightCorner(m(), s()) = Rau;
    r.bottomLeftCorner(s(), m()) = Rau.transpose();
    r.bottomRightCorner(s(), s()) = Ruu;
    return r;
  }

  bool dims_consistent(const Dimensions& d) const {
    return Jaa.rows() == d.m && Jaa.cols() == d.m && Jau.rows() == d.m && Jau.cols() == d.s &&
           Juu.rows() == d.s && Juu.cols() == d.s && Raa.rows() == d.m && Raa.cols() == d.m &&
           Rau.rows() == d.m && Rau.cols() == d.s && Ruu.rows() == d.s && Ruu.cols() == d.s;
  }
};

/// A plant in partitioned port-Hamiltonian form,
///   ẋ = [J(x) − R(x)] ∇H(x) + [I; 0] (u − d),   y = ∇_{x_a} H,
/// supplied as evaluator callbacks. x_star is a known open-loop equilibrium
/// at which ∇H vanishes (a minimum of H).
struct PhPlant {
  Dimensions dims;
  std::function<double(const PlantState&)> hamiltonian;
  std::function<GradH(const PlantState&)> grad_hamiltonian;
  std::function<StructureMatrices(const PlantState&)> structure;
  PlantState x_star;
};

/// Piecewise-constant matched disturbance: value switches at the listed times
/// and holds until the next switch; zero before the first switch.
struct DisturbanceSignal {
  struct Step {
    double t = 0.0;
    Vec value;
  };

  Index m = 0;
  std::vector<Step> steps;

  static DisturbanceSignal none(Index m) { return DisturbanceSignal{m, {}}; }

  static DisturbanceSignal step_at(double t, Vec value) {
    DisturbanceSignal d;
    d.m = value.size();
    d.steps.push_back({t, std::move(value)});
    return d;
  }

  void validate() const {
    require(m >= 1, ErrorCode::dimension, "disturbance dimension must be at least 1");
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& st : steps) {
      require(std::isfinite(st.t) && st.t > prev, ErrorCode::config,
              "disturbance switch times must be finite and strictly increasing");
      require(st.value.size() == m, ErrorCode::dimension, "disturbance value has wrong length");
      require(all_finite(st.value), ErrorCode::config, "disturbance value must be finite");
      prev = st.t;
    }
  }

  Vec value_at(double t) const {
    Vec v = Vec::Zero(m);
    for (const auto& st : steps) {
      if (st.t <= t)
        v = st.value;
      else
        break;
    }
    return v;
  }
};

/// Checks skew-symmetry of the J blocks and positive semidefiniteness of the
/// assembled R. Tolerances scale with the largest matrix entry.
inline ValidationReport validate_structure(const StructureMatrices& s, double tol = 1e-9) {
  require(s.Jaa.rows() == s.Jaa.cols() && s.Juu.rows() == s.Juu.cols() &&
              s.Raa.rows() == s.Raa.cols() && s.Ruu.rows() == s.Ruu.cols() &&
              s.Jaa.rows() == s.Raa.rows() && s.Juu.rows() == s.Ruu.rows() &&
              s.Jau.rows() == s.Jaa.rows() && s.Jau.cols() == s.Juu.rows() &&
              s.Rau.rows() == s.Raa.rows() && s.Rau.cols() == s.Ruu.rows(),
          ErrorCode::dimension, "structure matrices have inconsistent block dimensions");

  ValidationReport rep;
  const Mat j = s.assemble_J();
  const Mat r = s.assemble_R();
  const double j_tol = tol * std::max(1.0, max_abs(j));
  const double r_tol = tol * std::max(1.0, max_abs(r));

  const double jaa_res = skew_residual(s.Jaa);
  const double juu_res = skew_residual(s.Juu);
  const double raa_res = sym_residual(s.Raa);
  const double ruu_res = sym_residual(s.Ruu);
  const double r_min_eig = min_symmetric_eigenvalue(r);

  rep.checks.push_back({"Jaa_skew", jaa_res <= j_tol, jaa_res});
  rep.checks.push_back({"Juu_skew", juu_res <= j_tol, juu_res});
  rep.checks.push_back({"Raa_sym", raa_res <= r_tol, raa_res});
  rep.checks.push_back({"Ruu_sym", ruu_res <= r_tol, ruu_res});
  rep.checks.push_back({"R_psd", r_min_eig >= -r_tol, r_min_eig});
  return rep;
}

/// Right-hand side of the plant dynamics: ([J−R]∇H + [I;0](u − d)) split into
/// the (ẋ_a, ẋ_u) blocks.
inline std::pair<Vec, Vec> plant_vector_field(const PhPlant& p, const PlantState& x, const Vec& u,
                                              const Vec& d) {
  require(x.a.size() == p.dims.m && x.u.size() == p.dims.s, ErrorCode::dimension,
          "plant state has wrong block sizes");
  require(u.size() == p.dims.m && d.size() == p.dims.m, ErrorCode::dimension,
          "input and disturbance must have length m");
  const GradH g = p.grad_hamiltonian(x);
  require(all_finite(g.a) && all_finite(g.u), ErrorCode::numeric,
          "Hamiltonian gradient is not finite");
  const StructureMatrices s = p.structure(x);
  Vec xa_dot = (s.Jaa - s.Raa) * g.a + (s.Jau - s.Rau) * g.u + (u - d);
  Vec xu_dot = (-s.Jau.transpose() - s.Rau.transpose()) * g.a + (s.Juu - s.Ruu) * g.u;
  return {std::move(xa_dot), std::move(xu_dot)};
}

/// Passive output y = ∇_{x_a} H(x).
inline Vec plant_output(const PhPlant& p, const PlantState& x) {
  return p.grad_hamiltonian(x).a;
}

}  // namespace phia
