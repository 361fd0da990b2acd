#pragma once

#include "phia/certificates.hpp"
#include "phia/scenario.hpp"
#include "phia/sim.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace phia::cli {

namespace fs = std::filesystem;

// exit codes; kept in one place so the tool and the tests agree
inline constexpr int exit_ok = 0;
inline constexpr int exit_unexpected = 1;
inline constexpr int exit_parse = 2;
inline constexpr int exit_config = 3;
inline constexpr int exit_divergence = 4;
inline constexpr int exit_numeric = 5;
inline constexpr int exit_certificates_failed = 10;

inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::parse: return exit_parse;
    case ErrorCode::config: return exit_config;
    case ErrorCode::dimension: return exit_config;
    case ErrorCode::numeric: return exit_numeric;
    case ErrorCode::divergence: return exit_divergence;
  }
  return exit_unexpected;
}

inline bool log_enabled() {
  const char* v = std::getenv("PHIA_LOG");
  return v == nullptr || std::string_view(v) != "quiet";
}

inline void log_line(const std::string& msg) {
  if (log_enabled()) std::cerr << msg << "\n";
}

/// Shortest round-trip decimal representation, so CSV bytes are reproducible
/// and exact to re-read.
inline void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline std::string csv_header(Index m, Index s) {
  std::string h = "t";
  auto block = [&h](const char* name, Index count) {
    for (Index i = 0; i < count; ++i) {
      h += ',';
      h += name;
      h += std::to_string(i);
    }
  };
  block("xa", m);
  block("xu", s);
  block("xc", m);
  block("u", m);
  block("d", m);
  h += ",W,H";
  block("yd", 2 * m);
  return h;
}

/// Column contract: t, x_a, x_u, x_c, u, d, W, H, y_d — one row per sample.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const Index m = traj.xa.cols(), s = traj.xu.cols();
  std::string line = csv_header(m, s);
  line += '\n';
  out << line;
  for (Index k = 0; k < traj.samples(); ++k) {
    line.clear();
    append_double(line, traj.t[static_cast<size_t>(k)]);
    auto emit_row = [&line](const Mat& mat, Index row) {
      for (Index i = 0; i < mat.cols(); ++i) {
        line += ',';
        append_double(line, mat(row, i));
      }
    };
    emit_row(traj.xa, k);
    emit_row(traj.xu, k);
    emit_row(traj.xc, k);
    emit_row(traj.u, k);
    emit_row(traj.d, k);
    line += ',';
    append_double(line, traj.W[static_cast<size_t>(k)]);
    line += ',';
    append_double(line, traj.H[static_cast<size_t>(k)]);
    emit_row(traj.yd, k);
    line += '\n';
    out << line;
  }
}

/// Static certificate sweep over the scenario's operating box: the uniform
/// damping bound, the Schur blocks D1/D2, the symmetrized-R1 eigenvalue
/// route, and the agreement of the two routes wherever the bound holds.
inline CertificateReport certify_system(const Scenario& sc, double strict_tol = 1e-10) {
  require(std::holds_alternative<RobustIAGains>(sc.law), ErrorCode::config,
          "certificates are defined for the robust law");
  const RobustIAGains& g = std::get<RobustIAGains>(sc.law);
  const std::vector<StructureMatrices> samples = sc.structure_sampler(sc.cert);
  require(!samples.empty(), ErrorCode::config, "structure sampler produced no samples");

  CertificateReport rep;
  rep.structure_samples = static_cast<long>(samples.size());
  rep.assumption1_margin = std::numeric_limits<double>::infinity();
  rep.D1_margin = std::numeric_limits<double>::infinity();
  rep.D2_margin = std::numeric_limits<double>::infinity();
  rep.R1_sym_margin = std::numeric_limits<double>::infinity();
  rep.routes_agree = true;
  rep.schur_pass = true;
  rep.eig_route_pass = true;
  for (const StructureMatrices& s : samples) {
    const double a1 = min_symmetric_eigenvalue(3.0 * g.Dc3 - s.Raa);
    rep.assumption1_margin = std::min(rep.assumption1_margin, a1);
    const R1PsdReport r1 = check_R1_psd(s, g.Dc3);
    rep.D1_margin = std::min(rep.D1_margin, r1.D1_min_eig);
    rep.D2_margin = std::min(rep.D2_margin, r1.D2_min_eig);
    rep.R1_sym_margin = std::min(rep.R1_sym_margin, r1.R1_sym_min_eig);
    rep.schur_pass = rep.schur_pass && r1.schur_psd;
    rep.eig_route_pass = rep.eig_route_pass && r1.eig_psd;
    if (a1 > 0.0 && r1.schur_psd != r1.eig_psd) rep.routes_agree = false;
  }
  rep.assumption1_pass = rep.assumption1_margin > strict_tol;
  return rep;
}

inline json certificate_json(const CertificateReport& rep) {
  json j;
  j["assumption1"] = {{"margin", rep.assumption1_margin}, {"pass", rep.assumption1_pass}};
  j["schur"] = {{"D1_margin", rep.D1_margin},
                {"D2_margin", rep.D2_margin},
                {"pass", rep.schur_pass}};
  j["r1_symmetrized"] = {{"min_eig", rep.R1_sym_margin}, {"pass", rep.eig_route_pass}};
  j["routes_agree"] = rep.routes_agree;
  j["structure_samples"] = rep.structure_samples;
  if (rep.wdot_checked) {
    j["wdot"] = {{"checked", true},
                 {"samples", rep.wdot_samples},
                 {"violations", rep.wdot_violations},
                 {"worst_gap", rep.wdot_worst_gap},
                 {"pass", rep.wdot_pass}};
  } else {
    j["wdot"] = {{"checked", false}};
  }
  j["all_pass"] = rep.all_pass();
  return j;
}

struct RunOverrides {
  std::optional<double> step;
  std::optional<double> t_end;
};

struct RunResult {
  Trajectory trajectory;
  CertificateReport report;
  fs::path csv_path;
  fs::path diagnostics_path;
};

/// Loads a scenario, simulates it, and writes trajectory.csv plus
/// diagnostics.json into out_dir. Throws phia::Error on failure.
inline RunResult run_scenario(const fs::path& scenario_file, const fs::path& out_dir,
                              const RunOverrides& overrides = {}) {
  Scenario sc = load_scenario(scenario_file);
  if (overrides.step) sc.integrator.h = *overrides.step;
  if (overrides.t_end) sc.integrator.t_end = *overrides.t_end;
  require(sc.integrator.h > 0.0, ErrorCode::config, "step override must be positive");
  require(sc.integrator.t_end >= 0.0, ErrorCode::config, "t_end override must be nonnegative");

  const ClosedLoopSystem sys = sc.build_system();

  RunResult result;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  require(!ec, ErrorCode::config, "cannot create output directory: " + out_dir.string());
  result.csv_path = out_dir / "trajectory.csv";
  result.diagnostics_path = out_dir / "diagnostics.json";

  json diag;
  diag["scenario"] = sc.name.empty() ? scenario_file.filename().string() : sc.name;
  diag["plant"] = sc.plant_kind;
  diag["law"] = sys.is_robust() ? "robust" : "legacy";
  diag["integrator"] = {{"h", sc.integrator.h}, {"t_end", sc.integrator.t_end}};

  if (sc.integrator.t_end == 0.0) {
    // zero-duration run: header-only CSV, empty summary
    std::ofstream csv(result.csv_path, std::ios::binary);
    csv << csv_header(sc.plant.dims.m, sc.plant.dims.s) << "\n";
    diag["integrator"]["samples"] = 0;
    std::ofstream jd(result.diagnostics_path, std::ios::binary);
    jd << diag.dump(2) << "\n";
    log_line("wrote " + result.csv_path.string() + " (header only)");
    return result;
  }

  result.trajectory = integrate(sys, sc.x0, sc.xc0, sc.integrator);
  diag["integrator"]["samples"] = static_cast<long>(result.trajectory.samples());

  {
    std::ofstream csv(result.csv_path, std::ios::binary);
    require(csv.good(), ErrorCode::config, "cannot write " + result.csv_path.string());
    write_trajectory_csv(csv, result.trajectory);
  }

  if (sys.is_robust()) {
    result.report = certify_system(sc);
    const WdotReport wd = wdot_along(result.trajectory, sys);
    result.report.wdot_checked = true;
    result.report.wdot_samples = static_cast<long>(wd.samples.size());
    result.report.wdot_violations = wd.violations;
    result.report.wdot_worst_gap = wd.worst_gap;
    result.report.wdot_pass = wd.violations == 0;
    diag["certificates"] = certificate_json(result.report);
  }

  json summary;
  const Trajectory& tr = result.trajectory;
  const Index last = tr.samples() - 1;
  auto row_to_json = [](const Mat& mat, Index row) {
    std::vector<double> v(static_cast<size_t>(mat.cols()));
    for (Index i = 0; i < mat.cols(); ++i) v[static_cast<size_t>(i)] = mat(row, i);
    return v;
  };
  summary["final_xa"] = row_to_json(tr.xa, last);
  summary["final_xu"] = row_to_json(tr.xu, last);
  summary["final_xc"] = row_to_json(tr.xc, last);
  const double window = std::min(5.0, sc.integrator.t_end);
  summary["window_seconds"] = window;
  if (sc.target) summary["steady_state_error"] = steady_state_error(tr, *sc.target, window);
  double yd_tail = 0.0;
  for (Index k = 0; k < tr.samples(); ++k) {
    if (tr.t[static_cast<size_t>(k)] < tr.t.back() - window) continue;
    yd_tail = std::max(yd_tail, tr.yd.row(k).cwiseAbs().maxCoeff());
  }
  summary["yd_tail_max"] = yd_tail;
  diag["summary"] = summary;

  std::ofstream jd(result.diagnostics_path, std::ios::binary);
  require(jd.good(), ErrorCode::config, "cannot write " + result.diagnostics_path.string());
  jd << diag.dump(2) << "\n";
  log_line("wrote " + result.csv_path.string() + " and " + result.diagnostics_path.string());
  return result;
}

/// CLI entry: returns an exit status instead of throwing.
inline int run(const fs::path& scenario_file, const fs::path& out_dir,
               const RunOverrides& overrides = {}) {
  try {
    run_scenario(scenario_file, out_dir, overrides);
    return exit_ok;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: unexpected: " << e.what() << "\n";
    return exit_unexpected;
  }
}

struct CertifyOverrides {
  std::optional<int> grid;
  std::optional<std::pair<double, double>> box;
};

inline CertificateReport certify_scenario(const fs::path& scenario_file,
                                          const CertifyOverrides& overrides = {}) {
  Scenario sc = load_scenario(scenario_file);
  if (overrides.grid) sc.cert.grid = *overrides.grid;
  if (overrides.box) {
    sc.cert.box_lo = overrides.box->first;
    sc.cert.box_hi = overrides.box->second;
  }
  (void)sc.build_system();  // surfaces gain/dimension problems before certifying
  return certify_system(sc);
}

/// CLI entry: prints the certificate report as JSON to stdout; exit 0 iff
/// every certificate passes.
inline int certify(const fs::path& scenario_file, const CertifyOverrides& overrides = {}) {
  try {
    const CertificateReport rep = certify_scenario(scenario_file, overrides);
    std::cout << certificate_json(rep).dump(2) << "\n";
    return rep.all_pass() ? exit_ok : exit_certificates_failed;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: unexpected: " << e.what() << "\n";
    return exit_unexpected;
  }
}

}  // namespace phia::cli
