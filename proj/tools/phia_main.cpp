#include "phia/cli.hpp"

#include <CLI11.hpp>

#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{"port-Hamiltonian integral-action simulator and certificate checker"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  double step = 0.0;
  double t_end = -1.0;

  CLI::App* run = app.add_subcommand("run", "simulate a scenario; write trajectory.csv and "
                                            "diagnostics.json");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory (created if missing)");
  CLI::Option* step_opt = run->add_option("--step", step, "override integrator step [s]");
  CLI::Option* tend_opt = run->add_option("--t-end", t_end, "override simulation length [s]");

  std::string cert_path;
  int grid = 0;
  std::vector<double> box;
  CLI::App* certify = app.add_subcommand("certify", "evaluate the stability certificates; "
                                                    "print the report as JSON");
  certify->add_option("scenario", cert_path, "scenario JSON file")->required();
  CLI::Option* grid_opt = certify->add_option("--grid", grid, "samples per axis of the "
                                                              "operating box");
  CLI::Option* box_opt =
      certify->add_option("--box", box, "operating box LO HI")->expected(2);

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    phia::cli::RunOverrides ov;
    if (*step_opt) ov.step = step;
    if (*tend_opt) ov.t_end = t_end;
    return phia::cli::run(scenario_path, out_dir, ov);
  }
  phia::cli::CertifyOverrides ov;
  if (*grid_opt) ov.grid = grid;
  if (*box_opt) ov.box = std::make_pair(box[0], box[1]);
  return phia::cli::certify(cert_path, ov);
}
