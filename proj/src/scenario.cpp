#include "wide/scenario.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace wide {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double min_eps(const RunConfig& cfg) { return *std::min_element(cfg.solver.ladder.begin(), cfg.solver.ladder.end()); }

ContinuationOptions continuation_options(const RunConfig& cfg, std::ostream* log) {
  ContinuationOptions o;
  o.ladder = cfg.solver.ladder;
  o.t_obs = cfg.solver.t_obs;
  o.ht = cfg.solver.ht;
  o.kappa = cfg.solver.kappa;
  o.minimizer.grad_tol = cfg.solver.grad_tol;
  o.minimizer.max_iter = cfg.solver.max_iter;
  o.minimizer.memory = cfg.solver.memory;
  o.minimizer.log = log;
  return o;
}

void add(std::vector<DiagnosticRow>& rows, double eps, std::string name, double value) {
  rows.push_back({eps, std::move(name), value});
}

}  // namespace

std::string resolve_output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("WIDE_OUTPUT_DIR"); env && *env) return env;
  return cfg.output.dir;
}

FlowProblem make_problem(const RunConfig& cfg) {
  const auto& g = cfg.geometry;
  FlowProblem p;
  p.mesh = build_rect_channel(g.nx, g.ny, g.length, g.height, g.layout);
  p.extension = build_extension_field(p.mesh, InletProfile{cfg.data.inlet, cfg.data.peak}, cfg.data.fluxes);
  p.mesh = with_flux_targets(p.mesh, p.extension.outlet_fluxes);
  p.params = cfg.physics.params;
  p.params.eps = min_eps(cfg);
  if (cfg.physics.fx != 0.0 || cfg.physics.fy != 0.0) {
    const Eigen::Vector2d f(cfg.physics.fx, cfg.physics.fy);
    p.forcing = [f](double, const Eigen::Vector2d&) { return f; };
  }
  p.convection = cfg.solver.convection;
  return p;
}

std::vector<DiagnosticRow> diagnose_trajectory(const Trajectory& traj, const RunConfig& cfg, double eps) {
  FlowProblem problem = make_problem(cfg);
  problem.params.eps = eps;
  const ChannelMesh& mesh = problem.mesh;
  if (traj.v.rows() != mesh.dof_count()) throw std::invalid_argument("trajectory does not match the configured mesh");
  const ConstraintHandler h = make_constraint_handler(problem, cfg.solver.kappa);
  const double t_obs = cfg.solver.t_obs;
  const double t_end = std::min(t_obs, traj.horizon());

  std::vector<DiagnosticRow> rows;
  add(rows, eps, "flux_residual", flux_residual(traj.v, h));
  add(rows, eps, "divergence_norm", divergence_norm(mesh, traj, t_end));
  add(rows, eps, "trajectory_norm", l2_norm(mesh, traj, t_end));
  for (const auto& [name, value] : energy_report(traj, mesh, problem.params, t_end).entries)
    add(rows, eps, "energy_" + name, value);

  const Eigen::VectorXd d = Eigen::VectorXd::Constant(traj.t.size(), cfg.data.pressure_mean);
  const PressureField pressure = reconstruct_pressure(traj, problem, d);
  add(rows, eps, "pressure_mean_defect", pressure.mean_defect(mesh));

  // the default bumps live in [0.1, 0.9] t_obs
  if (traj.horizon() > 0.9 * t_obs) {
    std::vector<std::vector<Eigen::VectorXd>> eta(mesh.outlet_count);
    for (int i = 0; i < mesh.outlet_count; ++i)
      for (int kind = 0; kind < 3; ++kind) eta[i].push_back(outlet_multiplier(mesh, i, kind));
    const BoundaryReport br = boundary_report(traj, problem, pressure, default_time_bumps(t_obs), eta);
    for (std::size_t j = 0; j < br.psi.size(); ++j) {
      const std::string psi = "psi" + std::to_string(j);
      add(rows, eps, "wall_residual_" + psi, br.wall_residual[j]);
      add(rows, eps, "outlet_residual_" + psi, br.outlet_residual[j]);
      for (std::size_t i = 0; i < br.c[j].size(); ++i)
        for (std::size_t m = 0; m < br.c[j][i].size(); ++m)
          add(rows, eps, "c_" + psi + "_outlet" + std::to_string(i) + "_eta" + std::to_string(m), br.c[j][i][m]);
    }
  }
  return rows;
}

namespace {

void write_status(const std::filesystem::path& dir, const ScenarioResult& res) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream st(dir / "status.txt");
  st << "exit_code=" << res.exit_code << "\nmessage=" << res.message << '\n';
}

}  // namespace

ScenarioResult run_scenario(const RunConfig& cfg, std::ostream* log, bool write_files) {
  namespace fs = std::filesystem;
  const fs::path dir = resolve_output_dir(cfg);
  ScenarioResult res;
  FlowProblem problem;
  if (const auto problems = validate_config(cfg); !problems.empty()) {
    res.exit_code = 1;
    res.message = ConfigError(problems).what();
  } else {
    try {
      problem = make_problem(cfg);
    } catch (const std::invalid_argument& e) {
      res.exit_code = 1;
      res.message = e.what();
    }
  }
  if (res.exit_code != 0) {
    if (write_files) write_status(dir, res);
    return res;
  }

  try {
    if (write_files) {
      fs::create_directories(dir);
      std::ofstream(dir / "config.txt") << emit_config(cfg);
      std::ofstream vtk(dir / "mesh.vtk");
      write_vtk(vtk, problem.mesh, &problem.extension.velocity);
    }

    const ContinuationOptions copts = continuation_options(cfg, log);
    res.continuation = epsilon_continuation(problem, copts);
    const ChannelMesh& mesh = problem.mesh;
    const double t_obs = cfg.solver.t_obs;
    const double ht = res.continuation.time_grid[1] - res.continuation.time_grid[0];
    const double window = std::max(t_obs - 5.0 * min_eps(cfg), 0.0);

    if (cfg.solver.reference) {
      ReferenceOptions ro;
      ro.kappa = cfg.solver.kappa;
      res.reference = solve_reference(problem, t_obs, ht, ro);
      if (log) *log << "reference steps=" << res.reference.trajectory.slabs()
                    << " max_picard=" << res.reference.max_picard_iterations << '\n';
    }

    const ConstraintHandler h = make_constraint_handler(problem, cfg.solver.kappa);
    std::mt19937_64 rng(cfg.solver.seed);
    std::vector<DiagnosticRow>& rows = res.diagnostics;
    for (std::size_t i = 0; i < res.continuation.rungs.size(); ++i) {
      const RungResult& rung = res.continuation.rungs[i];
      const double eps = rung.eps;
      const Trajectory& traj = rung.result.trajectory;
      add(rows, eps, "value", rung.result.value);
      add(rows, eps, "gnorm", rung.result.gnorm);
      add(rows, eps, "iterations", rung.result.iterations);
      add(rows, eps, "converged", rung.result.status == MinimizerStatus::converged ? 1.0 : 0.0);
      add(rows, eps, "warm_start", rung.warm_start ? 1.0 : 0.0);
      add(rows, eps, "distance_to_previous", rung.distance_to_previous);
      add(rows, eps, "branch_switch", rung.branch_switch ? 1.0 : 0.0);

      FlowProblem rp = problem;
      rp.params.eps = eps;
      std::vector<Eigen::MatrixXd> tests;
      for (int k = 0; k < 3; ++k) tests.push_back(random_direction(h, static_cast<int>(traj.t.size()), rng, true));
      const El2Residual el2 = el2_residual(traj, rp, h, tests);
      add(rows, eps, "el2_ratio", (el2.residual.array().abs() / el2.test_norm.array()).maxCoeff());

      if (cfg.solver.reference) {
        const Trajectory& ref = res.reference.trajectory;
        const double dist = l2_distance(mesh, ref, traj, window);
        const double norm = l2_norm(mesh, ref, window);
        add(rows, eps, "distance_to_reference", dist);
        add(rows, eps, "relative_distance_to_reference", norm > 0.0 ? dist / norm : dist);
      }
      for (auto& r : diagnose_trajectory(traj, cfg, eps)) rows.push_back(std::move(r));

      if (write_files) {
        write_trajectory((dir / ("wide_rung" + std::to_string(i) + ".csv")).string(), traj, mesh,
                         {{"solver", "wide"}, {"eps", num(eps)}, {"nx", std::to_string(mesh.nx)},
                          {"ny", std::to_string(mesh.ny)}, {"value", num(rung.result.value)},
                          {"status", to_string(rung.result.status)}});
      }
    }
    if (cfg.solver.reference) {
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& e : res.reference.ledger) worst = std::max(worst, e.relative_violation());
      add(rows, 0.0, "energy_ledger_max_violation", res.reference.ledger.empty() ? 0.0 : worst);
      add(rows, 0.0, "max_picard_iterations", res.reference.max_picard_iterations);
      for (auto& r : diagnose_trajectory(res.reference.trajectory, cfg, min_eps(cfg))) {
        r.eps = 0.0;
        rows.push_back(std::move(r));
      }
    }

    if (write_files) {
      if (cfg.solver.reference)
        write_trajectory((dir / "reference.csv").string(), res.reference.trajectory, mesh,
                         {{"solver", "reference"}, {"nx", std::to_string(mesh.nx)}, {"ny", std::to_string(mesh.ny)}});
      std::ofstream csv(dir / "diagnostics.csv");
      write_diagnostics_csv(csv, rows);
      std::ofstream txt(dir / "report.txt");
      write_diagnostics_text(txt, rows);
      std::ofstream ed(dir / "epsilon_distance.csv");
      ed << std::setprecision(17) << "eps,distance,relative_distance\n";
      for (const auto& r : rows)
        if (r.quantity == "distance_to_reference") {
          double rel = 0.0;
          for (const auto& s : rows)
            if (s.eps == r.eps && s.quantity == "relative_distance_to_reference") rel = s.value;
          ed << r.eps << ',' << r.value << ',' << rel << '\n';
        }
      if (cfg.output.vtk && !res.continuation.rungs.empty()) {
        const Trajectory& last = res.continuation.rungs.back().result.trajectory;
        fs::create_directories(dir / "vtk");
        for (int k = 0; k < last.t.size(); ++k) {
          std::ofstream os(dir / "vtk" / ("wide_t" + std::to_string(k) + ".vtk"));
          const Eigen::VectorXd v = last.v.col(k);
          write_vtk(os, mesh, &v);
        }
      }
    }
    res.message = "ok";
  } catch (const std::exception& e) {
    res.exit_code = 2;
    res.message = e.what();
  }
  if (write_files) write_status(dir, res);
  return res;
}

}  // namespace wide
