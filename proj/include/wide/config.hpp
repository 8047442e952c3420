#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "wide/constitutive.hpp"
#include "wide/mesh.hpp"
#include "wide/operators.hpp"

namespace wide {

struct GeometryConfig {
  int nx = 16;
  int ny = 8;
  double length = 2.0;
  double height = 1.0;
  OutletLayout layout = OutletLayout::single;
  bool operator==(const GeometryConfig&) const = default;
};

struct PhysicsConfig {
  ConstitutiveParams params;  ///< eps is taken from the solver ladder
  double fx = 0.0;            ///< constant body force
  double fy = 0.0;
  bool operator==(const PhysicsConfig&) const = default;
};

struct DataConfig {
  InletProfile::Kind inlet = InletProfile::Kind::parabolic;
  double peak = 1.0;
  std::vector<double> fluxes;  ///< per outlet; empty means an even split
  double pressure_mean = 0.0;  ///< D, constant in time
  bool operator==(const DataConfig&) const = default;
};

struct SolverConfig {
  std::vector<double> ladder{0.4, 0.2, 0.1};
  double grad_tol = 1e-6;
  int max_iter = 2000;
  int memory = 10;
  double kappa = 1e4;
  double ht = 0.0;  ///< 0 means min(ladder)/4
  double t_obs = 1.0;
  unsigned seed = 42;
  Convection convection = Convection::rotational;
  bool reference = true;  ///< also run the time-stepping solver
  bool operator==(const SolverConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "wide_output";
  bool vtk = false;  ///< per-time-node snapshots of the last rung
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  GeometryConfig geometry;
  PhysicsConfig physics;
  DataConfig data;
  SolverConfig solver;
  OutputConfig output;
  bool operator==(const RunConfig&) const = default;
};

/// Parse or validation failure; what() lists every problem, one per line,
/// prefixed by "line N:" where a line is known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Line-based `section.key = value`; '#' starts a comment. Unknown keys are
/// errors. Runs validate_config on the result.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Every key, doubles with 17 significant digits.
std::string emit_config(const RunConfig& cfg);
/// Cross-field checks; empty when valid.
std::vector<std::string> validate_config(const RunConfig& cfg);

}  // namespace wide
