// Command-line front end: run, validate, diagnose, compare.
#include <CLI11.hpp>

#include <iomanip>
#include <iostream>

#include "wide/scenario.hpp"

namespace {

void fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << "status=" << kind << " exit_code=" << code << '\n' << message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WIDE functional solver for unsteady non-Newtonian channel flow"};
  app.require_subcommand(1);

  std::string config_path;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "continuation ladder, reference solve and diagnostics");
  run->add_option("config", config_path, "config file")->required();
  run->add_flag("-q,--quiet", quiet, "no progress lines");

  auto* validate = app.add_subcommand("validate", "parse and check a config");
  validate->add_option("config", config_path, "config file")->required();

  std::string traj_path;
  double eps = 0.0;
  auto* diagnose = app.add_subcommand("diagnose", "constraint, energy and boundary diagnostics of a trajectory");
  diagnose->add_option("trajectory", traj_path, "trajectory CSV")->required();
  diagnose->add_option("config", config_path, "config file")->required();
  diagnose->add_option("--eps", eps, "eps for weighted entries (default: metadata, else smallest ladder entry)");

  std::string a_path, b_path;
  auto* compare = app.add_subcommand("compare", "space-time L2 distance between two trajectories");
  compare->add_option("a", a_path, "trajectory CSV")->required();
  compare->add_option("b", b_path, "trajectory CSV")->required();

  CLI11_PARSE(app, argc, argv);

  wide::RunConfig cfg;
  if (!run->parsed() && !compare->parsed() && !validate->parsed() && !diagnose->parsed()) return 1;
  if (!compare->parsed()) {
    try {
      cfg = wide::load_config(config_path);
    } catch (const wide::ConfigError& e) {
      fail(1, "validation", e.what());
      return 1;
    }
  }

  if (validate->parsed()) {
    wide::ConstitutiveParams p = cfg.physics.params;
    p.eps = *std::min_element(cfg.solver.ladder.begin(), cfg.solver.ladder.end());
    for (const auto& note : wide::validate_params(p).notes) std::cout << "note: " << note << '\n';
    try {
      wide::make_problem(cfg);
    } catch (const std::invalid_argument& e) {
      fail(1, "validation", e.what());
      return 1;
    }
    std::cout << "ok\n";
    return 0;
  }

  if (run->parsed()) {
    const wide::ScenarioResult res = wide::run_scenario(cfg, quiet ? nullptr : &std::clog);
    if (res.exit_code != 0) {
      fail(res.exit_code, res.exit_code == 1 ? "validation" : "runtime", res.message);
      return res.exit_code;
    }
    std::cout << "output written to " << wide::resolve_output_dir(cfg) << '\n';
    return 0;
  }

  try {
    if (diagnose->parsed()) {
      const wide::TrajectoryFile f = wide::read_trajectory(traj_path);
      if (eps <= 0.0) {
        const auto it = f.meta.find("eps");
        eps = it != f.meta.end() ? std::stod(it->second)
                                 : *std::min_element(cfg.solver.ladder.begin(), cfg.solver.ladder.end());
      }
      wide::write_diagnostics_csv(std::cout, wide::diagnose_trajectory(f.trajectory, cfg, eps));
      return 0;
    }
    const wide::TrajectoryFile a = wide::read_trajectory(a_path), b = wide::read_trajectory(b_path);
    if (a.nodes.size() != b.nodes.size()) throw std::runtime_error("trajectories live on different meshes");
    for (std::size_t n = 0; n < a.nodes.size(); ++n)
      if ((a.nodes[n] - b.nodes[n]).norm() > 1e-12) throw std::runtime_error("trajectories live on different meshes");
    // mesh from the node cloud; the grid is uniform
    double length = 0.0, height = 0.0;
    for (const auto& x : a.nodes) {
      length = std::max(length, x.x());
      height = std::max(height, x.y());
    }
    int nx = 0;
    while (nx + 1 < static_cast<int>(a.nodes.size()) && a.nodes[nx + 1].y() == a.nodes[0].y()) ++nx;
    const int ny = static_cast<int>(a.nodes.size()) / (nx + 1) - 1;
    const wide::ChannelMesh mesh = wide::build_rect_channel(nx, ny, length, height);
    const double t_end = std::min(a.trajectory.horizon(), b.trajectory.horizon());
    std::cout << std::setprecision(17) << "t_end=" << t_end
              << "\nl2_distance=" << wide::l2_distance(mesh, a.trajectory, b.trajectory, t_end)
              << "\nl2_norm_a=" << wide::l2_norm(mesh, a.trajectory, t_end)
              << "\nl2_norm_b=" << wide::l2_norm(mesh, b.trajectory, t_end) << '\n';
    return 0;
  } catch (const std::exception& e) {
    fail(2, "runtime", e.what());
    return 2;
  }
}
