#pragma once

#include <vector>

#include <Eigen/Core>

#include "wide/functional.hpp"

namespace wide {

struct ReferenceOptions {
  double kappa = 1e4;
  double picard_tol = 1e-10;
  int picard_max = 200;
};

struct TimeStepperState {
  Eigen::VectorXd v;
  double t = 0.0;
  double h = 0.0;
  int picard_iterations = 0;
  double picard_update = 0.0;
};

/// One step of the discrete kinetic-energy inequality for w = v - v0:
/// lhs = 1/2|w+|^2 + h (int S(Dv):Dv + int_walls s(v).v + 2 kappa |div v|^2),
/// rhs = 1/2|w|^2 + h (int f.w + int S(Dv):Dv0 + int_walls s(v).v0 - int (rot v x v).v0).
struct EnergyLedgerEntry {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  /// (lhs - rhs) / max(|lhs|, |rhs|); positive means the inequality fails.
  double relative_violation() const;
};

/// Backward Euler for the weak momentum balance in rotational form over the
/// same constrained space as the WIDE path, with the same divergence penalty.
/// Picard linearization: rot v and the viscosities frozen at the previous
/// iterate; outlet fluxes enforced by bordered multiplier rows.
class ReferenceSolver {
 public:
  ReferenceSolver(const FlowProblem& problem, const ReferenceOptions& opts);

  TimeStepperState initial_state(double h) const;
  /// Throws std::runtime_error when Picard does not converge.
  TimeStepperState step(const TimeStepperState& s) const;
  EnergyLedgerEntry ledger(const TimeStepperState& before, const TimeStepperState& after) const;
  /// Steady problem (no time derivative) by Picard iteration from the extension.
  Eigen::VectorXd solve_steady() const;

  const ConstraintHandler& constraints() const { return h_; }

 private:
  Eigen::VectorXd picard(const Eigen::VectorXd& v_old, double h, double t_new, int& iterations,
                         double& update) const;

  FlowProblem problem_;
  ReferenceOptions opts_;
  ConstraintHandler h_;
};

struct ReferenceRun {
  Trajectory trajectory;
  std::vector<EnergyLedgerEntry> ledger;
  int max_picard_iterations = 0;
};

/// Time loop over [0, t_end] with step close to h (adjusted to divide t_end).
ReferenceRun solve_reference(const FlowProblem& problem, double t_end, double h, const ReferenceOptions& opts);

}  // namespace wide
