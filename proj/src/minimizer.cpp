#include "wide/minimizer.hpp"

#include <cmath>
#include <deque>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace wide {

std::string to_string(MinimizerStatus s) {
  switch (s) {
    case MinimizerStatus::converged:
      return "converged";
    case MinimizerStatus::max_iterations:
      return "max_iterations";
    case MinimizerStatus::line_search_failure:
      return "line_search_failure";
  }
  return "unknown";
}

namespace {

double weighted_norm(const Eigen::VectorXd& g, const Eigen::VectorXd& scale) {
  if (scale.size() == 0) return g.norm();
  return g.cwiseProduct(scale).norm();
}

void log_line(const MinimizerOptions& o, int iter, double value, double gnorm) {
  if (!o.log) return;
  *o.log << std::setprecision(17) << "eps=" << o.log_eps << " iter=" << iter << " value=" << value
         << " gnorm=" << gnorm << '\n';
}

}  // namespace

LbfgsResult lbfgs(const Objective& obj, Eigen::VectorXd x0, const MinimizerOptions& opts) {
  if (!obj.value_grad) throw std::invalid_argument("objective without value_grad");
  LbfgsResult res;
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(x.size());
  double f = obj.value_grad(x, g);
  ++res.stats.evaluations;
  double gn = weighted_norm(g, obj.scale);

  std::deque<Eigen::VectorXd> ss, ys;
  std::deque<double> rhos;
  Eigen::VectorXd d(x.size()), xn(x.size()), gnew(x.size());

  auto apply_h0 = [&](Eigen::VectorXd& q) {
    if (obj.precondition) obj.precondition(q);
    if (obj.project) obj.project(q);
  };

  int iter = 0;
  res.status = MinimizerStatus::max_iterations;
  for (;; ++iter) {
    if (gn <= opts.grad_tol * (1.0 + std::abs(f))) {
      res.status = MinimizerStatus::converged;
      break;
    }
    if (iter >= opts.max_iter) break;
    if (opts.log_every > 0 && iter % opts.log_every == 0) log_line(opts, iter, f, gn);

    // Two-loop recursion.
    d = g;
    const int m = static_cast<int>(ss.size());
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rhos[i] * ss[i].dot(d);
      d -= alpha[i] * ys[i];
    }
    apply_h0(d);
    for (int i = 0; i < m; ++i) {
      const double beta = rhos[i] * ys[i].dot(d);
      d += (alpha[i] - beta) * ss[i];
    }
    d = -d;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      ss.clear();
      ys.clear();
      rhos.clear();
      d = g;
      apply_h0(d);
      d = -d;
      slope = g.dot(d);
      if (!(slope < 0.0)) {
        d = -g;
        slope = g.dot(d);
      }
    }

    // Backtracking Armijo; near round-off level the value test is replaced by
    // an approximate Wolfe test on the slope.
    double step = 1.0, fn = f;
    bool accepted = false;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      xn = x + step * d;
      fn = obj.value_grad(xn, gnew);
      ++res.stats.evaluations;
      if (std::isfinite(fn)) {
        if (fn <= f + opts.armijo * step * slope) {
          accepted = true;
          break;
        }
        const double noise = 1e-10 * std::max(std::abs(f), 1e-300);
        if (std::abs(fn - f) <= noise && gnew.dot(d) <= 0.8 * std::abs(slope)) {
          ++res.stats.approximate_accepts;
          accepted = true;
          break;
        }
      }
      ++res.stats.backtracks;
      step *= 0.5;
    }
    if (!accepted) {
      res.status = MinimizerStatus::line_search_failure;
      break;
    }

    Eigen::VectorXd s = xn - x;
    Eigen::VectorXd y = gnew - g;
    const double sy = s.dot(y);
    if (sy > 0.0) {
      ss.push_back(std::move(s));
      ys.push_back(std::move(y));
      rhos.push_back(1.0 / sy);
      if (static_cast<int>(ss.size()) > opts.memory) {
        ss.pop_front();
        ys.pop_front();
        rhos.pop_front();
      }
    } else {
      ++res.stats.skipped_updates;
    }
    x.swap(xn);
    g.swap(gnew);
    f = fn;
    gn = weighted_norm(g, obj.scale);
  }
  log_line(opts, iter, f, gn);
  res.x = std::move(x);
  res.value = f;
  res.gnorm = gn;
  res.iterations = iter;
  return res;
}

double balanced_gradient_norm(const Eigen::MatrixXd& g, const Eigen::VectorXd& t, double eps) {
  double acc = 0.0;
  for (int k = 0; k < g.cols(); ++k) acc += std::exp(t[k] / eps) * g.col(k).squaredNorm();
  return std::sqrt(acc);
}

MinimizerResult minimize(const Trajectory& initial, const FlowProblem& problem, const ConstraintHandler& h,
                         const MinimizerOptions& opts) {
  const int n = static_cast<int>(initial.v.rows());
  const int cols = static_cast<int>(initial.v.cols());
  const double eps = problem.params.eps;
  Trajectory work;
  work.t = initial.t;
  work.v = project_admissible(initial.v, h);

  const SpaceTimePreconditioner pre(problem, h, initial.t);

  Objective obj;
  obj.value_grad = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    work.v = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, cols);
    const FunctionalEval e = evaluate_with_gradient(work, problem, h);
    grad = Eigen::Map<const Eigen::VectorXd>(e.gradient.data(), e.gradient.size());
    return e.value;
  };
  obj.project = [&](Eigen::VectorXd& d) {
    Eigen::MatrixXd m = Eigen::Map<Eigen::MatrixXd>(d.data(), n, cols);
    project_direction(m, h);
    d = Eigen::Map<Eigen::VectorXd>(m.data(), m.size());
  };
  obj.precondition = [&](Eigen::VectorXd& d) {
    Eigen::MatrixXd m = Eigen::Map<Eigen::MatrixXd>(d.data(), n, cols);
    pre.apply(m);
    d = Eigen::Map<Eigen::VectorXd>(m.data(), m.size());
  };
  obj.scale.resize(static_cast<Eigen::Index>(n) * cols);
  for (int k = 0; k < cols; ++k) obj.scale.segment(static_cast<Eigen::Index>(k) * n, n).setConstant(std::exp(0.5 * initial.t[k] / eps));

  Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(work.v.data(), work.v.size());
  MinimizerOptions o = opts;
  if (o.log_eps == 0.0) o.log_eps = eps;
  LbfgsResult lr = lbfgs(obj, std::move(x0), o);

  // Re-project to clear drift accumulated by the line-search updates.
  MinimizerResult out;
  out.trajectory.t = initial.t;
  out.trajectory.v = project_admissible(Eigen::Map<const Eigen::MatrixXd>(lr.x.data(), n, cols), h);
  out.eval = evaluate_with_gradient(out.trajectory, problem, h);
  out.value = out.eval.value;
  out.gnorm = balanced_gradient_norm(out.eval.gradient, initial.t, eps);
  out.iterations = lr.iterations;
  out.status = lr.status;
  if (out.status == MinimizerStatus::max_iterations && out.gnorm <= o.grad_tol * (1.0 + std::abs(out.value)))
    out.status = MinimizerStatus::converged;
  out.stats = lr.stats;
  return out;
}

Eigen::VectorXd continuation_grid(const ContinuationOptions& opts) {
  if (opts.ladder.empty()) throw std::invalid_argument("empty eps ladder");
  double emax = opts.ladder.front(), emin = opts.ladder.front();
  for (double e : opts.ladder) {
    emax = std::max(emax, e);
    emin = std::min(emin, e);
  }
  const double horizon = opts.t_obs + 8.0 * emax;
  const double ht = opts.ht > 0.0 ? opts.ht : 0.25 * emin;
  const int slabs = std::max(2, static_cast<int>(std::ceil(horizon / ht - 1e-9)));
  return Eigen::VectorXd::LinSpaced(slabs + 1, 0.0, horizon);
}

ContinuationReport epsilon_continuation(const FlowProblem& problem, const ContinuationOptions& opts) {
  for (std::size_t i = 0; i < opts.ladder.size(); ++i) {
    if (!(opts.ladder[i] > 0.0)) throw std::invalid_argument("eps ladder entries must be positive");
    if (i > 0 && !(opts.ladder[i] < opts.ladder[i - 1]))
      throw std::invalid_argument("eps ladder must be strictly decreasing");
  }
  ContinuationReport rep;
  rep.ladder = opts.ladder;
  rep.t_obs = opts.t_obs;
  rep.time_grid = continuation_grid(opts);

  const ConstraintHandler h = make_constraint_handler(problem, opts.kappa);
  Trajectory cold;
  cold.t = rep.time_grid;
  cold.v = problem.extension.velocity.replicate(1, rep.time_grid.size());

  rep.rungs.reserve(opts.ladder.size());
  const Trajectory* previous = nullptr;
  double previous_normalized = 0.0;
  for (double eps : opts.ladder) {
    FlowProblem rung = problem;
    rung.params.eps = eps;
    RungResult rr;
    rr.eps = eps;
    const Trajectory* start = &cold;
    if (previous) {
      const double warm = evaluate(*previous, rung, h).value;
      const double fresh = evaluate(cold, rung, h).value;
      rr.warm_start = warm <= fresh;
      if (rr.warm_start) start = previous;
    }
    MinimizerOptions mo = opts.minimizer;
    mo.log_eps = eps;
    rr.result = minimize(*start, rung, h, mo);
    const double mass = eps * -std::expm1(-rep.time_grid[rep.time_grid.size() - 1] / eps);
    const double normalized = rr.result.value / mass;
    if (previous) {
      rr.distance_to_previous = l2_distance(problem.mesh, rr.result.trajectory, *previous, opts.t_obs);
      rr.branch_switch = std::abs(normalized - previous_normalized) > 0.1 * std::abs(previous_normalized);
    }
    previous_normalized = normalized;
    rep.rungs.push_back(std::move(rr));
    previous = &rep.rungs.back().result.trajectory;
  }
  return rep;
}

}  // namespace wide
