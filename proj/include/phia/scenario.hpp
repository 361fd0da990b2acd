#pragma once

#include "phia/closed_loop.hpp"
#include "phia/manipulator.hpp"
#include "phia/quadratic.hpp"
#include "phia/sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace phia {

using json = nlohmann::json;

/// Structure-sampling options for the certificate sweep: R_aa is
/// state-dependent, so the uniform damping bound is checked over a grid of
/// operating points (joint velocities for the manipulator).
struct CertificateOptions {
  double box_lo = -10.0;
  double box_hi = 10.0;
  int grid = 50;
};

/// A fully parsed scenario: plant, law, initial condition, disturbance
/// schedule, integrator settings, and a plant-specific sampler that produces
/// structure matrices over the declared operating box.
struct Scenario {
  std::string name;
  std::string plant_kind;  // "manipulator-2dof" or "custom-quadratic"
  PhPlant plant;
  ControlLaw law;
  PlantState x0;
  ControllerState xc0;
  DisturbanceSignal disturbance;
  IntegratorConfig integrator;
  CertificateOptions cert;
  std::function<std::vector<StructureMatrices>(const CertificateOptions&)> structure_sampler;
  std::optional<Vec> target;  // steady-state reference for x_u, when meaningful
  std::optional<ManipulatorParams> manipulator;

  ClosedLoopSystem build_system() const { return {plant, law, disturbance}; }
};

namespace detail {

inline const json& member(const json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  require(it != j.end(), ErrorCode::parse, "missing key '" + where + key + "'");
  return *it;
}

inline double number_at(const json& j, const std::string& key, const std::string& where) {
  const json& v = member(j, key, where);
  require(v.is_number(), ErrorCode::parse, "key '" + where + key + "' must be a number");
  return v.get<double>();
}

inline Vec parse_vector(const json& v, Index size, const std::string& where) {
  require(v.is_array(), ErrorCode::parse, "key '" + where + "' must be an array of numbers");
  require(size < 0 || static_cast<Index>(v.size()) == size, ErrorCode::parse,
          "key '" + where + "' has the wrong length");
  Vec out(static_cast<Index>(v.size()));
  for (Index i = 0; i < out.size(); ++i) {
    const json& e = v[static_cast<size_t>(i)];
    require(e.is_number(), ErrorCode::parse, "key '" + where + "' must contain only numbers");
    out(i) = e.get<double>();
  }
  return out;
}

/// Matrices are row-major nested arrays; the shorthand {"diag": [...]} builds
/// a diagonal matrix.
inline Mat parse_matrix(const json& v, Index rows, Index cols, const std::string& where) {
  if (v.is_object() && v.contains("diag")) {
    const Vec d = parse_vector(v["diag"], rows == cols ? rows : -1, where + ".diag");
    require(rows < 0 || d.size() == rows, ErrorCode::parse,
            "key '" + where + ".diag' has the wrong length");
    return Mat(d.asDiagonal());
  }
  require(v.is_array() && !v.empty(), ErrorCode::parse,
          "key '" + where + "' must be a nested array or {\"diag\": [...]}");
  const Index r = static_cast<Index>(v.size());
  require(rows < 0 || r == rows, ErrorCode::parse, "key '" + where + "' has the wrong row count");
  Mat out;
  for (Index i = 0; i < r; ++i) {
    const Vec row = parse_vector(v[static_cast<size_t>(i)], cols,
                                 where + "[" + std::to_string(i) + "]");
    if (i == 0) out.resize(r, row.size());
    require(row.size() == out.cols(), ErrorCode::parse,
            "key '" + where + "' has ragged rows");
    out.row(i) = row.transpose();
  }
  return out;
}

inline ManipulatorParams parse_manipulator_params(const json& p) {
  ManipulatorParams prm;  // defaults are the standard experiment values
  if (p.contains("a1")) prm.a1 = number_at(p, "a1", "plant.params.");
  if (p.contains("a2")) prm.a2 = number_at(p, "a2", "plant.params.");
  if (p.contains("b")) prm.b = number_at(p, "b", "plant.params.");
  if (p.contains("alpha")) {
    const Vec a = parse_vector(p["alpha"], 2, "plant.params.alpha");
    prm.alpha1 = a(0);
    prm.alpha2 = a(1);
  }
  if (p.contains("beta")) {
    const Vec b = parse_vector(p["beta"], 2, "plant.params.beta");
    prm.beta1 = b(0);
    prm.beta2 = b(1);
  }
  if (p.contains("Kd")) prm.Kd = parse_matrix(p["Kd"], 2, 2, "plant.params.Kd");
  if (p.contains("Kp")) prm.Kp = parse_matrix(p["Kp"], 2, 2, "plant.params.Kp");
  if (p.contains("qd")) prm.qd = parse_vector(p["qd"], 2, "plant.params.qd");
  if (p.contains("friction_sign")) {
    const std::string sign = p["friction_sign"].get<std::string>();
    if (sign == "psd")
      prm.friction_sign = FrictionSign::psd;
    else if (sign == "negated")
      prm.friction_sign = FrictionSign::negated;
    else
      throw Error(ErrorCode::parse, "key 'plant.params.friction_sign' must be 'psd' or 'negated'");
  }
  return prm;
}

inline Mat parse_robust_dc3(const json& law, const std::optional<ManipulatorParams>& manip,
                            Index m) {
  const json& v = member(law, "Dc3", "law.");
  if (v.is_object() && v.contains("half_kd_plus_dbar")) {
    require(manip.has_value(), ErrorCode::config,
            "law.Dc3.half_kd_plus_dbar requires the manipulator-2dof plant");
    const std::string kind = v["half_kd_plus_dbar"].get<std::string>();
    Eigen::Matrix2d dbar;
    if (kind == "supremum")
      dbar = friction_bound_supremum(*manip);
    else if (kind == "alpha-over-beta")
      dbar = friction_bound_alpha_over_beta(*manip);
    else
      throw Error(ErrorCode::parse,
                  "key 'law.Dc3.half_kd_plus_dbar' must be 'supremum' or 'alpha-over-beta'");
    return 0.5 * (manip->Kd + dbar);
  }
  return parse_matrix(v, m, m, "law.Dc3");
}

}  // namespace detail

inline Scenario parse_scenario(const json& j) {
  Scenario sc;
  if (j.contains("name")) sc.name = j["name"].get<std::string>();

  const json& plant = detail::member(j, "plant", "");
  sc.plant_kind = detail::member(plant, "type", "plant.").get<std::string>();
  const json params = plant.contains("params") ? plant["params"] : json::object();

  if (sc.plant_kind == "manipulator-2dof") {
    ManipulatorParams prm = detail::parse_manipulator_params(params);
    prm.validate();
    sc.manipulator = prm;
    sc.plant = build_plant(prm);
    sc.target = Vec(prm.qd);
    sc.structure_sampler = [prm](const CertificateOptions& opt) {
      // sample R_aa = Kd + Dp(q̇) over a uniform q̇ grid; q is immaterial to
      // the damping, so evaluate at q = qd with p = M(qd) q̇
      require(opt.grid >= 2 && opt.box_hi > opt.box_lo, ErrorCode::config,
              "certificate grid needs at least 2 points and box_hi > box_lo");
      const PhPlant pl = build_plant(prm);
      const Eigen::Matrix2d mq = mass_matrix(prm, prm.qd);
      std::vector<StructureMatrices> out;
      out.reserve(static_cast<size_t>(opt.grid) * static_cast<size_t>(opt.grid));
      for (int i = 0; i < opt.grid; ++i) {
        for (int k = 0; k < opt.grid; ++k) {
          const double f1 = static_cast<double>(i) / (opt.grid - 1);
          const double f2 = static_cast<double>(k) / (opt.grid - 1);
          Eigen::Vector2d qdot(opt.box_lo + f1 * (opt.box_hi - opt.box_lo),
                               opt.box_lo + f2 * (opt.box_hi - opt.box_lo));
          out.push_back(pl.structure({mq * qdot, prm.qd}));
        }
      }
      return out;
    };
  } else if (sc.plant_kind == "custom-quadratic") {
    QuadraticPlantParams prm;
    prm.dims.m = static_cast<Index>(detail::number_at(params, "m", "plant.params."));
    prm.dims.s = static_cast<Index>(detail::number_at(params, "s", "plant.params."));
    require(prm.dims.valid(), ErrorCode::config, "plant.params needs m >= 1, s >= 0");
    const Index m = prm.dims.m, s = prm.dims.s, n = prm.dims.n();
    if (params.contains("Q")) prm.Q = detail::parse_matrix(params["Q"], n, n, "plant.params.Q");
    if (params.contains("Jaa"))
      prm.Jaa = detail::parse_matrix(params["Jaa"], m, m, "plant.params.Jaa");
    if (params.contains("Jau"))
      prm.Jau = detail::parse_matrix(params["Jau"], m, s, "plant.params.Jau");
    if (params.contains("Juu"))
      prm.Juu = detail::parse_matrix(params["Juu"], s, s, "plant.params.Juu");
    if (params.contains("Raa"))
      prm.Raa = detail::parse_matrix(params["Raa"], m, m, "plant.params.Raa");
    if (params.contains("Rau"))
      prm.Rau = detail::parse_matrix(params["Rau"], m, s, "plant.params.Rau");
    if (params.contains("Ruu"))
      prm.Ruu = detail::parse_matrix(params["Ruu"], s, s, "plant.params.Ruu");
    if (params.contains("x_star")) {
      const json& xs = params["x_star"];
      prm.xa_star = detail::parse_vector(detail::member(xs, "x_a", "plant.params.x_star."), m,
                                         "plant.params.x_star.x_a");
      prm.xu_star = detail::parse_vector(detail::member(xs, "x_u", "plant.params.x_star."), s,
                                         "plant.params.x_star.x_u");
    }
    sc.plant = build_quadratic_plant(prm);
    const StructureMatrices fixed = sc.plant.structure(sc.plant.x_star);
    sc.structure_sampler = [fixed](const CertificateOptions&) {
      return std::vector<StructureMatrices>{fixed};  // structure is constant
    };
  } else {
    throw Error(ErrorCode::parse,
                "key 'plant.type' must be 'manipulator-2dof' or 'custom-quadratic'");
  }

  const Index m = sc.plant.dims.m, s = sc.plant.dims.s;

  const json& law = detail::member(j, "law", "");
  const std::string law_type = detail::member(law, "type", "law.").get<std::string>();
  if (law_type == "robust") {
    RobustIAGains g;
    g.Ki = detail::parse_matrix(detail::member(law, "Ki", "law."), m, m, "law.Ki");
    g.Dc1 = detail::parse_matrix(detail::member(law, "Dc1", "law."), m, m, "law.Dc1");
    g.Dc2 = detail::parse_matrix(detail::member(law, "Dc2", "law."), m, m, "law.Dc2");
    g.Dc3 = detail::parse_robust_dc3(law, sc.manipulator, m);
    sc.law = g;
  } else if (law_type == "legacy") {
    LegacyIAGains g;
    g.Ki = detail::parse_matrix(detail::member(law, "Ki", "law."), m, m, "law.Ki");
    g.Jc1 = detail::parse_matrix(detail::member(law, "Jc1", "law."), m, m, "law.Jc1");
    g.Rc1 = detail::parse_matrix(detail::member(law, "Rc1", "law."), m, m, "law.Rc1");
    g.Rc2 = detail::parse_matrix(detail::member(law, "Rc2", "law."), m, m, "law.Rc2");
    sc.law = g;
  } else {
    throw Error(ErrorCode::parse, "key 'law.type' must be 'robust' or 'legacy'");
  }

  const json& init = detail::member(j, "initial", "");
  sc.x0.a = detail::parse_vector(detail::member(init, "x_a", "initial."), m, "initial.x_a");
  sc.x0.u = detail::parse_vector(detail::member(init, "x_u", "initial."), s, "initial.x_u");
  sc.xc0 = detail::parse_vector(detail::member(init, "x_c", "initial."), m, "initial.x_c");

  sc.disturbance = DisturbanceSignal::none(m);
  if (j.contains("disturbance")) {
    const json& dist = j["disturbance"];
    require(dist.is_array(), ErrorCode::parse, "key 'disturbance' must be an array of steps");
    for (size_t i = 0; i < dist.size(); ++i) {
      const std::string where = "disturbance[" + std::to_string(i) + "].";
      DisturbanceSignal::Step st;
      st.t = detail::number_at(dist[i], "t", where);
      st.value = detail::parse_vector(detail::member(dist[i], "value", where), m,
                                      where + "value");
      sc.disturbance.steps.push_back(std::move(st));
    }
  }
  sc.disturbance.validate();

  const json& integ = detail::member(j, "integrator", "");
  sc.integrator.h = detail::number_at(integ, "h", "integrator.");
  sc.integrator.t_end = detail::number_at(integ, "t_end", "integrator.");
  require(sc.integrator.h > 0.0, ErrorCode::config, "integrator.h must be positive");
  require(sc.integrator.t_end >= 0.0, ErrorCode::config, "integrator.t_end must be nonnegative");

  if (j.contains("certificates")) {
    const json& cert = j["certificates"];
    if (cert.contains("box")) {
      const Vec box = detail::parse_vector(cert["box"], 2, "certificates.box");
      sc.cert.box_lo = box(0);
      sc.cert.box_hi = box(1);
    }
    if (cert.contains("grid"))
      sc.cert.grid = static_cast<int>(detail::number_at(cert, "grid", "certificates."));
  }
  if (j.contains("target"))
    sc.target = detail::parse_vector(j["target"], s, "target");

  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  require(in.good(), ErrorCode::parse, "cannot open scenario file: " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, "scenario is not valid JSON: " + std::string(e.what()));
  }
  return parse_scenario(j);
}

}  // namespace phia
