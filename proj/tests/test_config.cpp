#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace wide;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wide_test_config_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig tiny(const fs::path& dir) {
  RunConfig c;
  c.geometry.nx = 4;
  c.geometry.ny = 2;
  c.solver.ladder = {0.4, 0.2};
  c.solver.t_obs = 0.5;
  c.output.dir = dir.string();
  return c;
}

}  // namespace

TEST_CASE("minimal config keeps the defaults") {
  const RunConfig c = parse_config("# comment only\n\ngeometry.nx = 16  # trailing\n");
  CHECK(c == RunConfig{});
}

TEST_CASE("every key round-trips through emit and parse") {
  RunConfig c;
  c.geometry = {12, 6, 3.0, 1.5, OutletLayout::two_outlets};
  c.physics.params.r = 2.25;
  c.physics.params.q = 5.0;
  c.physics.params.rho_q = 0.125;
  c.physics.fx = 0.1 / 3.0;
  c.data = {InletProfile::Kind::uniform, 2.0, {0.5, 1.5}, -0.7};
  c.solver.ladder = {0.3, 0.15};
  c.solver.ht = 0.03;
  c.solver.convection = Convection::standard;
  c.solver.reference = false;
  c.solver.seed = 9;
  c.output = {"some/dir", true};
  const RunConfig back = parse_config(emit_config(c));
  CHECK(back == c);
  CHECK(emit_config(back) == emit_config(c));
}

TEST_CASE("shear-thinning exponent is rejected with the admissible range") {
  try {
    parse_config("physics.r = 1.5\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    REQUIRE(!e.problems().empty());
    CHECK(e.problems().front().find("physics: ") == 0);
    CHECK(std::string(e.what()).find("r >= 2") != std::string::npos);
  }
}

TEST_CASE("parse errors carry line numbers and are all reported") {
  try {
    parse_config("geometry.nx = 8\nsolver.bogus = 1\ngeometry.nx = 9\nnot a pair\nsolver.eps = abc\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    const auto& p = e.problems();
    REQUIRE(p.size() == 4);
    CHECK(p[0] == "line 2: unknown key 'solver.bogus'");
    CHECK(p[1].find("line 3: duplicate key 'geometry.nx' (first on line 1)") == 0);
    CHECK(p[2].find("line 4:") == 0);
    CHECK(p[3].find("line 5: solver.eps") == 0);
  }
}

TEST_CASE("cross-field validation") {
  RunConfig c;
  c.solver.ladder = {0.1, 0.2};
  CHECK(!validate_config(c).empty());
  c.solver.ladder = {0.2, 0.1};
  c.solver.ht = 0.05;
  CHECK(!validate_config(c).empty());
  c.solver.ht = 0.025;
  CHECK(validate_config(c).empty());
  c.data.fluxes = {0.5, 0.5};
  CHECK(!validate_config(c).empty());
  CHECK_THROWS_AS(load_config("/nonexistent/wide.cfg"), ConfigError);
}

TEST_CASE("two outlets with mismatched fluxes fail validation with exit code 1") {
  const fs::path dir = scratch("mismatch");
  RunConfig c = tiny(dir);
  c.geometry.ny = 6;
  c.geometry.layout = OutletLayout::two_outlets;
  c.data.fluxes = {0.1, 0.1};
  const ScenarioResult r = run_scenario(c);
  CHECK(r.exit_code == 1);
  CHECK(r.message.find("net boundary flux mismatch") != std::string::npos);
  CHECK(slurp(dir / "status.txt").find("exit_code=1") != std::string::npos);
}

TEST_CASE("zero data gives zero outputs") {
  const fs::path dir = scratch("zero");
  RunConfig c = tiny(dir);
  c.data.inlet = InletProfile::Kind::zero;
  const ScenarioResult r = run_scenario(c);
  REQUIRE(r.exit_code == 0);
  for (const auto& rung : r.continuation.rungs) {
    CHECK(rung.result.trajectory.v.cwiseAbs().maxCoeff() == 0.0);
    CHECK(rung.result.value == 0.0);
  }
  CHECK(r.reference.trajectory.v.cwiseAbs().maxCoeff() == 0.0);
  for (const auto& row : r.diagnostics)
    if (row.quantity == "trajectory_norm" || row.quantity == "flux_residual" || row.quantity.rfind("energy_", 0) == 0)
      CHECK(row.value == 0.0);
  CHECK(fs::exists(dir / "diagnostics.csv"));
  CHECK(fs::exists(dir / "wide_rung0.csv"));
  CHECK(fs::exists(dir / "reference.csv"));
}

TEST_CASE("identical configs give byte-identical diagnostics") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run_scenario(tiny(a)).exit_code == 0);
  REQUIRE(run_scenario(tiny(b)).exit_code == 0);
  const std::string da = slurp(a / "diagnostics.csv");
  CHECK(da.size() > 100);
  CHECK(da == slurp(b / "diagnostics.csv"));
  CHECK(slurp(a / "wide_rung1.csv") == slurp(b / "wide_rung1.csv"));
}

TEST_CASE("trajectory files round-trip exactly") {
  const fs::path dir = scratch("io");
  fs::create_directories(dir);
  const FlowProblem p = test::small_problem(5, 3);
  Trajectory tr = steady_trajectory(p.extension.velocity, 1.0, 3);
  tr.v.col(2) *= 1.0 / 3.0;
  tr.t[1] = 0.1;
  write_trajectory((dir / "t.csv").string(), tr, p.mesh, {{"solver", "wide"}});
  const TrajectoryFile f = read_trajectory((dir / "t.csv").string());
  CHECK(f.trajectory.t == tr.t);
  CHECK(f.trajectory.v == tr.v);
  REQUIRE(f.nodes.size() == p.mesh.nodes.size());
  CHECK(f.nodes[7] == p.mesh.nodes[7]);
  CHECK(f.meta.at("solver") == "wide");
  CHECK_THROWS(read_trajectory((dir / "missing.csv").string()));
}

TEST_CASE("WIDE_OUTPUT_DIR overrides the configured directory") {
  RunConfig c;
  c.output.dir = "configured";
  unsetenv("WIDE_OUTPUT_DIR");
  CHECK(resolve_output_dir(c) == "configured");
  setenv("WIDE_OUTPUT_DIR", "/tmp/elsewhere", 1);
  CHECK(resolve_output_dir(c) == "/tmp/elsewhere");
  unsetenv("WIDE_OUTPUT_DIR");
}
