#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wide/functional.hpp"

namespace wide {

/// Smooth objective over a linear subspace. value_grad must return the
/// gradient already projected onto the subspace.
struct Objective {
  std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)> value_grad;
  std::function<void(Eigen::VectorXd&)> project;       ///< optional tangent projection
  std::function<void(Eigen::VectorXd&)> precondition;  ///< optional initial inverse Hessian
  Eigen::VectorXd scale;  ///< stopping-norm weights; empty means the plain 2-norm
};

struct MinimizerOptions {
  double grad_tol = 1e-6;
  int max_iter = 2000;
  int memory = 10;
  int max_backtracks = 50;
  double armijo = 1e-4;
  int log_every = 25;
  std::ostream* log = nullptr;  ///< progress lines, silent when null
  double log_eps = 0.0;         ///< eps value echoed in progress lines
};

enum class MinimizerStatus { converged, max_iterations, line_search_failure };
std::string to_string(MinimizerStatus s);

struct LineSearchStats {
  long evaluations = 0;
  long backtracks = 0;
  long approximate_accepts = 0;  ///< steps accepted by the round-off safeguard
  long skipped_updates = 0;      ///< curvature pairs with s.y <= 0
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double gnorm = 0.0;
  int iterations = 0;
  MinimizerStatus status = MinimizerStatus::max_iterations;
  LineSearchStats stats;
};

/// Limited-memory BFGS with backtracking Armijo search. Stops when the
/// weighted gradient norm is below grad_tol * (1 + |value|).
LbfgsResult lbfgs(const Objective& obj, Eigen::VectorXd x0, const MinimizerOptions& opts);

/// Initial inverse Hessian for the WIDE functional: the exact inverse of its
/// quadratic part at v = 0 without convection, restricted to free dofs and
/// time nodes t > 0. Diagonalized in space by a generalized eigenproblem,
/// tridiagonal in time per mode.
class SpaceTimePreconditioner {
 public:
  SpaceTimePreconditioner(const FlowProblem& problem, const ConstraintHandler& h, const Eigen::VectorXd& time_grid);
  void apply(Eigen::MatrixXd& g) const;

 private:
  std::vector<int> free_;
  Eigen::MatrixXd modes_;     ///< M-orthonormal eigenvectors on free dofs
  Eigen::VectorXd lambda_;
  Eigen::VectorXd weights_;   ///< exponential slab weights
  double eps_ = 1.0;
  double h_ = 1.0;
};

struct MinimizerResult {
  Trajectory trajectory;
  double value = 0.0;
  double gnorm = 0.0;  ///< balanced norm, see balanced_gradient_norm
  int iterations = 0;
  MinimizerStatus status = MinimizerStatus::max_iterations;
  LineSearchStats stats;
  FunctionalEval eval;  ///< breakdown at the returned trajectory
};

/// || e^{t_k/(2 eps)} g_k ||: the gradient norm in which every time node
/// counts equally despite the e^{-t/eps} weight.
double balanced_gradient_norm(const Eigen::MatrixXd& g, const Eigen::VectorXd& t, double eps);

MinimizerResult minimize(const Trajectory& initial, const FlowProblem& problem, const ConstraintHandler& h,
                         const MinimizerOptions& opts);

struct ContinuationOptions {
  std::vector<double> ladder{0.4, 0.2, 0.1};
  double t_obs = 1.0;
  double ht = 0.0;  ///< 0 means min(ladder)/4
  double kappa = 1e4;
  MinimizerOptions minimizer;
};

/// Shared time grid of a ladder: horizon t_obs + 8 max(eps), step <= ht.
Eigen::VectorXd continuation_grid(const ContinuationOptions& opts);

struct RungResult {
  double eps = 0.0;
  MinimizerResult result;
  bool warm_start = true;         ///< false when the cold start had lower value
  double distance_to_previous = 0.0;  ///< L2 on [0, t_obs]; 0 for the first rung
  bool branch_switch = false;     ///< normalized value jumped by more than 10%
};

struct ContinuationReport {
  std::vector<double> ladder;
  double t_obs = 1.0;
  Eigen::VectorXd time_grid;
  std::vector<RungResult> rungs;
};

/// Minimizes along a strictly decreasing eps ladder, warm-starting each rung.
ContinuationReport epsilon_continuation(const FlowProblem& problem, const ContinuationOptions& opts);

}  // namespace wide
