#pragma once

#include "phia/closed_loop.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace phia {

/// Fixed-step classical 4th-order Runge-Kutta. Switch times of the
/// disturbance schedule must land on step boundaries.
struct IntegratorConfig {
  double h = 1e-3;
  double t_end = 0.0;
};

/// Time-stamped records along a simulation; one row per integrator step plus
/// the initial sample. All signal matrices have samples() rows.
struct Trajectory {
  std::vector<double> t;
  Mat xa, xu, xc;  // states
  Mat u, d;        // control and disturbance, length-m rows
  Mat y;           // passive output
  Mat yd;          // detectability output, length-2m rows
  std::vector<double> W;  // Lyapunov function of the active law
  std::vector<double> H;  // plant Hamiltonian

  Index samples() const { return static_cast<Index>(t.size()); }
};

template <class F>
Vec rk4_step(F&& f, double t, const Vec& y, double h) {
  const Vec k1 = f(t, y);
  const Vec k2 = f(t + 0.5 * h, Vec(y + (0.5 * h) * k1));
  const Vec k3 = f(t + 0.5 * h, Vec(y + (0.5 * h) * k2));
  const Vec k4 = f(t + h, Vec(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace detail {

inline long step_count(const IntegratorConfig& cfg) {
  require(cfg.h > 0.0 && std::isfinite(cfg.h), ErrorCode::config, "step size must be positive");
  require(cfg.t_end >= cfg.h, ErrorCode::config, "t_end must be at least one step");
  const long n = std::lround(cfg.t_end / cfg.h);
  require(n >= 1 && std::abs(static_cast<double>(n) * cfg.h - cfg.t_end) <=
                        1e-9 * std::max(1.0, cfg.t_end),
          ErrorCode::config, "t_end must be an integer multiple of the step size");
  return n;
}

}  // namespace detail

/// Generic fixed-step RK4 driver for a raw field f(t, y); returns the sample
/// times and one state row per sample. Throws a divergence error naming the
/// last good time if the state leaves the finite range.
template <class F>
std::pair<std::vector<double>, Mat> integrate_field(F&& f, const Vec& y0,
                                                    const IntegratorConfig& cfg) {
  const long n = detail::step_count(cfg);
  std::vector<double> times(static_cast<size_t>(n) + 1);
  Mat states(n + 1, y0.size());
  Vec y = y0;
  times[0] = 0.0;
  states.row(0) = y;
  for (long k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * cfg.h;
    y = rk4_step(f, t, y, cfg.h);
    require(y.allFinite(), ErrorCode::divergence,
            "state diverged; last good time t = " + std::to_string(t));
    times[static_cast<size_t>(k) + 1] = static_cast<double>(k + 1) * cfg.h;
    states.row(k + 1) = y;
  }
  return {std::move(times), std::move(states)};
}

/// Integrates the closed loop and records state, control, disturbance,
/// outputs, Lyapunov function and Hamiltonian at every sample.
///
/// The disturbance is held constant over each step (sampled at the step
/// start), so a step that ends on a switch instant still sees the value from
/// the left; the new value takes over on the step that starts there.
inline Trajectory integrate(const ClosedLoopSystem& sys, const PlantState& x0,
                            const ControllerState& xc0, const IntegratorConfig& cfg) {
  const Index m = sys.plant.dims.m, s = sys.plant.dims.s;
  require(x0.a.size() == m && x0.u.size() == s && xc0.size() == m, ErrorCode::dimension,
          "initial state has wrong block sizes");
  const long n = detail::step_count(cfg);

  // switch instants must align with the step grid; compare by index afterwards
  std::vector<long> switch_steps;
  for (const auto& st : sys.disturbance.steps) {
    const long ks = std::lround(st.t / cfg.h);
    require(std::abs(static_cast<double>(ks) * cfg.h - st.t) <= 1e-9 * std::max(1.0, st.t),
            ErrorCode::config, "disturbance switch times must be integer multiples of h");
    switch_steps.push_back(ks);
  }

  Trajectory traj;
  traj.t.resize(static_cast<size_t>(n) + 1);
  traj.xa.resize(n + 1, m);
  traj.xu.resize(n + 1, s);
  traj.xc.resize(n + 1, m);
  traj.u.resize(n + 1, m);
  traj.d.resize(n + 1, m);
  traj.y.resize(n + 1, m);
  traj.yd.resize(n + 1, 2 * m);
  traj.W.resize(static_cast<size_t>(n) + 1);
  traj.H.resize(static_cast<size_t>(n) + 1);

  Vec state(2 * m + s);
  state << x0.a, x0.u, xc0;

  auto disturbance_at_step = [&](long k) -> Vec {
    Vec v = Vec::Zero(m);
    for (size_t i = 0; i < switch_steps.size(); ++i) {
      if (switch_steps[i] <= k)
        v = sys.disturbance.steps[i].value;
      else
        break;
    }
    return v;
  };

  for (long k = 0; k <= n; ++k) {
    const double tk = static_cast<double>(k) * cfg.h;
    const PlantState x{state.head(m), state.segment(m, s)};
    const Vec xc = state.tail(m);
    const Vec dk = disturbance_at_step(k);
    const AugmentedState w = to_w(x, xc);

    traj.t[static_cast<size_t>(k)] = tk;
    traj.xa.row(k) = x.a.transpose();
    traj.xu.row(k) = x.u.transpose();
    traj.xc.row(k) = xc.transpose();
    traj.d.row(k) = dk.transpose();
    traj.y.row(k) = plant_output(sys.plant, x).transpose();
    traj.H[static_cast<size_t>(k)] = sys.plant.hamiltonian(x);

    if (sys.is_robust()) {
      const RobustIAGains& g = sys.robust_gains();
      traj.u.row(k) = robust_ia_control(sys.plant, g, x, xc).transpose();
      const Vec gw = grad_W(sys.plant, g, w, dk);
      traj.yd.row(k).head(m) = gw.head(m).transpose();
      traj.yd.row(k).tail(m) = gw.tail(m).transpose();
      traj.W[static_cast<size_t>(k)] = lyapunov_W(sys.plant, g, w, dk);
    } else {
      const LegacyIAGains& g = sys.legacy_gains();
      traj.u.row(k) = legacy_ia_control(sys.plant, g, x, xc).transpose();
      // integral-offset residual of the legacy law, vanishing at its shifted
      // equilibrium w_c = K_i^-1 R_c1^-1 d
      traj.yd.row(k).head(m) = traj.y.row(k);
      traj.yd.row(k).tail(m) = (g.Ki * w.wc - spd_solve(g.Rc1, dk)).transpose();
      traj.W[static_cast<size_t>(k)] = lyapunov_Wl(sys.plant, g, w, dk);
    }

    if (k == n) break;
    auto field = [&](double, const Vec& y) -> Vec {
      return field_direct_d(sys, PlantState{y.head(m), y.segment(m, s)}, y.tail(m), dk);
    };
    state = rk4_step(field, tk, state, cfg.h);
    require(state.allFinite(), ErrorCode::divergence,
            "closed loop diverged; last good time t = " + std::to_string(tk));
  }
  return traj;
}

/// Max over the final `window` seconds of ||x_u(t) − target||_inf.
inline double steady_state_error(const Trajectory& traj, const Vec& target, double window) {
  require(traj.samples() > 0, ErrorCode::config, "trajectory is empty");
  require(target.size() == traj.xu.cols(), ErrorCode::dimension,
          "target must match the x_u dimension");
  const double t_from = traj.t.back() - window;
  double worst = 0.0;
  for (Index k = 0; k < traj.samples(); ++k) {
    if (traj.t[static_cast<size_t>(k)] < t_from) continue;
    worst = std::max(worst, (traj.xu.row(k).transpose() - target).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Central-difference dW/dt along the recorded samples (second-order one-sided
/// at the ends). Matches the analytic rate to O(h²) away from disturbance
/// switches; samples whose stencil straddles a switch will disagree.
inline std::vector<double> numerical_wdot(const Trajectory& traj) {
  const size_t n = traj.W.size();
  require(n >= 3, ErrorCode::config, "need at least three samples to differentiate");
  const double h = traj.t[1] - traj.t[0];
  std::vector<double> out(n);
  out[0] = (-3.0 * traj.W[0] + 4.0 * traj.W[1] - traj.W[2]) / (2.0 * h);
  for (size_t k = 1; k + 1 < n; ++k) out[k] = (traj.W[k + 1] - traj.W[k - 1]) / (2.0 * h);
  out[n - 1] = (3.0 * traj.W[n - 1] - 4.0 * traj.W[n - 2] + traj.W[n - 3]) / (2.0 * h);
  return out;
}

}  // namespace phia
