#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "wide/config.hpp"
#include "wide/diagnostics.hpp"
#include "wide/minimizer.hpp"
#include "wide/reference.hpp"

namespace wide {

/// Trajectory CSV `t,node_id,x,y,vx,vy` plus `<path>.meta` with key=value lines.
void write_trajectory(const std::string& path, const Trajectory& traj, const ChannelMesh& mesh,
                      const std::map<std::string, std::string>& meta);

struct TrajectoryFile {
  Trajectory trajectory;
  std::vector<Eigen::Vector2d> nodes;
  std::map<std::string, std::string> meta;  ///< empty when no companion file
};

TrajectoryFile read_trajectory(const std::string& path);

struct DiagnosticRow {
  double eps = 0.0;  ///< 0 for rows that belong to the reference run
  std::string quantity;
  double value = 0.0;
};

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticRow>& rows);
/// Aligned text table grouped by eps.
void write_diagnostics_text(std::ostream& os, const std::vector<DiagnosticRow>& rows);

/// Mesh, extension field (throws on flux mismatch), forcing and parameters;
/// eps is the smallest ladder entry.
FlowProblem make_problem(const RunConfig& cfg);

struct ScenarioResult {
  int exit_code = 0;  ///< 0 success, 1 validation, 2 runtime
  std::string message;
  ContinuationReport continuation;
  ReferenceRun reference;
  std::vector<DiagnosticRow> diagnostics;
};

/// geometry, extension, ladder, reference solve, pressure, reports. Writes
/// artifacts into cfg.output.dir unless write_files is false; progress goes to
/// log when non-null. Never throws for validation or solver failures.
ScenarioResult run_scenario(const RunConfig& cfg, std::ostream* log = nullptr, bool write_files = true);

/// Diagnostics of an existing trajectory under cfg: constraints, energy
/// report, pressure and boundary report.
std::vector<DiagnosticRow> diagnose_trajectory(const Trajectory& traj, const RunConfig& cfg, double eps);

/// Output directory after the WIDE_OUTPUT_DIR override.
std::string resolve_output_dir(const RunConfig& cfg);

}  // namespace wide
