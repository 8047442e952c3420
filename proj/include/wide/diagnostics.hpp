#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "wide/functional.hpp"

namespace wide {

/// Cellwise-constant, time-integrated pressure P(t) = int_0^t p, shifted so
/// that int_Omega P(t) = D(t). Q is the zero-mean multiplier of the Stokes
/// problem and K the cell mean of int_0^t |v|^2/2.
struct PressureField {
  Eigen::VectorXd t;
  Eigen::VectorXd d;  ///< target means D(t_k)
  Eigen::MatrixXd p;  ///< cells x time nodes
  Eigen::MatrixXd q;
  Eigen::MatrixXd k;

  /// Largest |int_Omega P(t_k) - D(t_k)|.
  double mean_defect(const ChannelMesh& mesh) const;
};

struct PressureOptions {
  double stabilization = 0.25;  ///< weight of the pressure-jump term, times h
};

/// d holds one sample per time node (or is empty for D = 0).
PressureField reconstruct_pressure(const Trajectory& traj, const FlowProblem& problem, const Eigen::VectorXd& d,
                                   const PressureOptions& opts = {});

/// Smooth bump exp(-1/(1-s^2)) mapped onto (a, b).
struct TimeBump {
  double a = 0.0;
  double b = 1.0;
  double operator()(double t) const;
};

/// Boundary test fields: nodal dof vectors carried by one boundary part.
struct BoundaryTestSet {
  std::vector<Eigen::VectorXd> wall;
  std::vector<Eigen::VectorXd> outlet;  ///< zero net flux per outlet
};

BoundaryTestSet default_boundary_tests(const ChannelMesh& mesh, const std::vector<Eigen::VectorXd>& eta);

/// Normal multiplier fields on outlet i with unit (trapezoid) flux and zero
/// end values; kind 0: sin(pi s), 1: s(1-s), 2: sin(pi s)^2.
Eigen::VectorXd outlet_multiplier(const ChannelMesh& mesh, int outlet, int kind);

struct BoundaryReport {
  std::vector<TimeBump> psi;
  std::vector<std::vector<Eigen::VectorXd>> eta;  ///< eta[i] = multipliers of outlet i
  /// c[j][i][m]: constant for psi j, outlet i, multiplier m.
  std::vector<std::vector<std::vector<double>>> c;
  std::vector<double> wall_residual;    ///< per psi, relative to the boundary L2 norm of w
  std::vector<double> outlet_residual;  ///< per psi
};

/// Trace pairing <T_psi n, w> through the discrete extension E w, for
/// diagnostics and tests.
class BoundaryPairing {
 public:
  BoundaryPairing(const Trajectory& traj, const FlowProblem& problem, const PressureField& pressure,
                  const TimeBump& psi);
  double pairing(const Eigen::VectorXd& w) const;
  /// int int_walls s(v) psi . w
  double wall_friction(const Eigen::VectorXd& w) const;
  /// 1/2 int int_outlets |v|^2 psi n . w
  double outlet_dynamic(const Eigen::VectorXd& w) const;
  Eigen::VectorXd extension(const Eigen::VectorXd& w) const;

 private:
  ChannelMesh mesh_;
  std::vector<Eigen::Matrix2d> tensor_;   ///< T_psi per Gauss point
  std::vector<Eigen::Vector2d> div_;      ///< div T_psi per Gauss point
  std::vector<Eigen::Vector2d> friction_; ///< per wall edge point, time integrated
  std::vector<double> dynamic_;           ///< per outlet edge point
  Eigen::MatrixXd extension_;             ///< boundary values -> interior solve
  std::vector<int> interior_;
};

/// Supports of the default bumps: [0.2,0.8], [0.1,0.6], [0.4,0.9] times t_obs.
std::vector<TimeBump> default_time_bumps(double t_obs);

BoundaryReport boundary_report(const Trajectory& traj, const FlowProblem& problem, const PressureField& pressure,
                               const std::vector<TimeBump>& psi, const std::vector<std::vector<Eigen::VectorXd>>& eta);

/// Norms of the uniform estimates, evaluated on [0, t_end].
struct EnergyReport {
  double eps = 0.0;
  std::vector<std::pair<std::string, double>> entries;
  double get(const std::string& name) const;
};

/// Names of entries that are bounded in both directions and of the
/// eps-weighted rate entries.
const std::vector<std::string>& energy_dissipation_names();
const std::vector<std::string>& energy_rate_names();

EnergyReport energy_report(const Trajectory& traj, const ChannelMesh& mesh, const ConstitutiveParams& params,
                           double t_end);

/// (|grad w|_p^p + |w|_p^p) / (|Dw|_p^p + |w|_{p,walls}^p).
double korn_ratio(const ChannelMesh& mesh, const Eigen::VectorXd& w, double p);

struct KornEstimate {
  double ratio = 0.0;
  Eigen::VectorXd field;
};

/// Best ratio over projected gradient ascent from random admissible starts;
/// a lower bound on the Korn-Poincare constant.
KornEstimate estimate_korn_constant(const ChannelMesh& mesh, double p, unsigned seed = 42, int starts = 20,
                                    int iterations = 400);

}  // namespace wide
