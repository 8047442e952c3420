#pragma once

#include <functional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "wide/constitutive.hpp"
#include "wide/mesh.hpp"
#include "wide/operators.hpp"

namespace wide {

using Forcing = std::function<Eigen::Vector2d(double t, const Eigen::Vector2d& x)>;

/// Everything the functional and the time stepper need besides the unknowns.
struct FlowProblem {
  ChannelMesh mesh;
  ExtensionField extension;
  ConstitutiveParams params;
  Forcing forcing;  ///< empty means f = 0
  Convection convection = Convection::rotational;
};

/// Hard constraints on trajectories: prescribed dofs (inlet, wall normals at
/// every time, the whole field at t=0), one flux row per outlet and time node
/// acting on w = v - v0, and the divergence penalty weight.
struct ConstraintHandler {
  std::vector<bool> fixed;             ///< per spatial dof, for t > 0
  Eigen::VectorXd fixed_values;        ///< extension field
  Eigen::VectorXd initial;             ///< v(0)
  std::vector<Eigen::VectorXd> flux_rows;       ///< full trapezoid rows
  std::vector<Eigen::VectorXd> free_flux_rows;  ///< restricted to free dofs
  double kappa = 1e4;
};

ConstraintHandler make_constraint_handler(const FlowProblem& problem, double kappa);

/// Nearest admissible trajectory: prescribed rows reset, flux rows projected.
Eigen::MatrixXd project_admissible(const Eigen::MatrixXd& v, const ConstraintHandler& h);
/// Projection onto the tangent space of the constraints (for directions and
/// gradients): prescribed rows and column 0 zeroed, flux components removed.
void project_direction(Eigen::MatrixXd& d, const ConstraintHandler& h);
/// Largest |int_{Gamma_F^i} (v - v0).n| over outlets and time nodes.
double flux_residual(const Eigen::MatrixXd& v, const ConstraintHandler& h);

struct FunctionalEval {
  double value = 0.0;
  double inertia = 0.0;
  double forcing = 0.0;
  double bulk = 0.0;
  double boundary = 0.0;
  double penalty = 0.0;
  Eigen::MatrixXd gradient;  ///< projected; empty unless requested

  double breakdown_sum() const { return inertia + forcing + bulk + boundary + penalty; }
};

/// Discrete WIDE functional. Throws std::invalid_argument for trajectories
/// that violate the hard constraints.
FunctionalEval evaluate(const Trajectory& traj, const FlowProblem& problem, const ConstraintHandler& h);
FunctionalEval evaluate_with_gradient(const Trajectory& traj, const FlowProblem& problem, const ConstraintHandler& h);
Eigen::MatrixXd gradient(const Trajectory& traj, const FlowProblem& problem, const ConstraintHandler& h);

/// Same sums, without checks or gradient; skips the constraint test so it can
/// be used on arbitrary fields.
FunctionalEval evaluate_unchecked(const Trajectory& traj, const FlowProblem& problem, double kappa,
                                  bool with_gradient);

struct El2Residual {
  Eigen::VectorXd residual;
  Eigen::VectorXd test_norm;
};

/// Unweighted Euler-Lagrange residual: directional derivative of the
/// functional along phi = e^{t/eps} pi for each test field pi.
El2Residual el2_residual(const Trajectory& traj, const FlowProblem& problem, const ConstraintHandler& h,
                         const std::vector<Eigen::MatrixXd>& tests);

/// Random tangent direction; vanishes at t=0, and at t=T when pinned_end.
Eigen::MatrixXd random_direction(const ConstraintHandler& h, int time_nodes, std::mt19937_64& rng, bool pinned_end);

/// Cell-mean divergence of every time node up to t_end, L2 in space-time.
double divergence_norm(const ChannelMesh& mesh, const Trajectory& traj, double t_end);

}  // namespace wide
