#include "wide/reference.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wide/assembly.hpp"

namespace wide {

double EnergyLedgerEntry::relative_violation() const {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return (lhs - rhs) / scale;
}

ReferenceSolver::ReferenceSolver(const FlowProblem& problem, const ReferenceOptions& opts)
    : problem_(problem), opts_(opts), h_(make_constraint_handler(problem, opts.kappa)) {}

TimeStepperState ReferenceSolver::initial_state(double h) const {
  TimeStepperState s;
  s.v = h_.initial;
  s.t = 0.0;
  s.h = h;
  return s;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Picard matrix at the frozen iterate vm: mass/h (h = 0 drops it), frozen
// rotation, frozen viscosities, wall friction and the divergence penalty.
void assemble_picard(const FlowProblem& problem, double kappa, const Eigen::VectorXd& vm, double h, double t_new,
                     Triplets& trip, Eigen::VectorXd& load) {
  const ChannelMesh& mesh = problem.mesh;
  const ConstitutiveParams& p = problem.params;
  const CellBasis b = make_cell_basis(mesh);
  const auto bulk = detail::bulk_law(p, false);
  const auto wall = detail::wall_law(p, false);
  const double inv_h = h > 0.0 ? 1.0 / h : 0.0;
  std::vector<Eigen::Vector2d> points;
  if (problem.forcing) points = quadrature_points(mesh);

  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto& cell = mesh.cells[c];
    Eigen::Matrix<double, 8, 8> k = Eigen::Matrix<double, 8, 8>::Zero();
    for (int q = 0; q < 4; ++q) {
      const PointState s = point_state(b, cell, vm, q);
      const double omega = s.omega();
      const double mu = detail::law_factor(norm2(s.sym()), bulk);
      const double w = b.weight;
      Eigen::Vector2d f = Eigen::Vector2d::Zero();
      if (problem.forcing) f = problem.forcing(t_new, points[4 * c + q]);
      for (int a = 0; a < 4; ++a) {
        load[2 * cell[a]] += w * f.x() * b.n[q][a];
        load[2 * cell[a] + 1] += w * f.y() * b.n[q][a];
        for (int e = 0; e < 4; ++e) {
          const double nn = w * b.n[q][a] * b.n[q][e];
          const double ax = b.dndx[q][a], ay = b.dndy[q][a], cx = b.dndx[q][e], cy = b.dndy[q][e];
          k(2 * a, 2 * e) += inv_h * nn + w * mu * (ax * cx + 0.5 * ay * cy);
          k(2 * a + 1, 2 * e + 1) += inv_h * nn + w * mu * (ay * cy + 0.5 * ax * cx);
          k(2 * a, 2 * e + 1) += -omega * nn + w * mu * 0.5 * ay * cx;
          k(2 * a + 1, 2 * e) += omega * nn + w * mu * 0.5 * ax * cy;
        }
      }
    }
    if (kappa > 0.0) {
      const double s = 2.0 * kappa * b.area;
      double g[8];
      for (int a = 0; a < 4; ++a) {
        g[2 * a] = b.mean_dndx[a];
        g[2 * a + 1] = b.mean_dndy[a];
      }
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) k(i, j) += s * g[i] * g[j];
    }
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        if (k(i, j) != 0.0) trip.emplace_back(2 * cell[i / 2] + i % 2, 2 * cell[j / 2] + j % 2, k(i, j));
  }

  for (const auto& e : mesh.edges) {
    if (e.tag != BoundaryTag::wall) continue;
    for (double s : kEdgePoints) {
      const double n[2] = {1.0 - s, s};
      const int id[2] = {e.a, e.b};
      const Eigen::Vector2d vq = n[0] * vm.segment<2>(2 * e.a) + n[1] * vm.segment<2>(2 * e.b);
      const double mu = detail::law_factor(vq.squaredNorm(), wall);
      const double w = 0.5 * e.length;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int d = 0; d < 2; ++d) trip.emplace_back(2 * id[i] + d, 2 * id[j] + d, w * mu * n[i] * n[j]);
    }
  }
}

}  // namespace

Eigen::VectorXd ReferenceSolver::picard(const Eigen::VectorXd& v_old, double h, double t_new, int& iterations,
                                        double& update) const {
  const ChannelMesh& mesh = problem_.mesh;
  const int n = mesh.dof_count();
  const int nout = static_cast<int>(h_.flux_rows.size());
  const SparseMatrix mass = h > 0.0 ? mass_matrix(mesh) : SparseMatrix(n, n);

  Eigen::VectorXd v = v_old;
  for (int d = 0; d < n; ++d)
    if (h_.fixed[d]) v[d] = h_.fixed_values[d];

  for (iterations = 1; iterations <= opts_.picard_max; ++iterations) {
    Triplets trip;
    Eigen::VectorXd load = Eigen::VectorXd::Zero(n + nout);
    Eigen::VectorXd body = Eigen::VectorXd::Zero(n);
    assemble_picard(problem_, opts_.kappa, v, h, t_new, trip, body);
    if (h > 0.0) body += (mass * v_old) / h;

    // Prescribed rows become identities; flux multipliers border the rest.
    Triplets kept;
    kept.reserve(trip.size() + 2 * n);
    for (const auto& t : trip)
      if (!h_.fixed[t.row()]) kept.push_back(t);
    for (int d = 0; d < n; ++d) {
      if (h_.fixed[d]) {
        kept.emplace_back(d, d, 1.0);
        load[d] = h_.fixed_values[d];
      } else {
        load[d] = body[d];
      }
    }
    for (int i = 0; i < nout; ++i) {
      const Eigen::VectorXd& c = h_.flux_rows[i];
      for (int d = 0; d < n; ++d) {
        if (c[d] == 0.0) continue;
        kept.emplace_back(n + i, d, c[d]);
        if (!h_.fixed[d]) kept.emplace_back(d, n + i, c[d]);
      }
      load[n + i] = c.dot(h_.fixed_values);
    }
    SparseMatrix k(n + nout, n + nout);
    k.setFromTriplets(kept.begin(), kept.end());
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(k);
    if (lu.info() != Eigen::Success) throw std::runtime_error("reference solver: singular Picard system");
    const Eigen::VectorXd sol = lu.solve(load);
    Eigen::VectorXd next = sol.head(n);
    for (int d = 0; d < n; ++d)
      if (h_.fixed[d]) next[d] = h_.fixed_values[d];
    update = (next - v).lpNorm<Eigen::Infinity>();
    v = next;
    if (update <= opts_.picard_tol * std::max(1.0, v.lpNorm<Eigen::Infinity>())) return v;
  }
  throw std::runtime_error("reference solver: Picard iteration did not converge in " +
                           std::to_string(opts_.picard_max) + " iterations (update " + std::to_string(update) + ")");
}

TimeStepperState ReferenceSolver::step(const TimeStepperState& s) const {
  if (!(s.h > 0.0)) throw std::invalid_argument("time step must be positive");
  TimeStepperState out;
  out.h = s.h;
  out.t = s.t + s.h;
  out.v = picard(s.v, s.h, out.t, out.picard_iterations, out.picard_update);
  return out;
}

Eigen::VectorXd ReferenceSolver::solve_steady() const {
  int it = 0;
  double upd = 0.0;
  return picard(h_.fixed_values, 0.0, 0.0, it, upd);
}

EnergyLedgerEntry ReferenceSolver::ledger(const TimeStepperState& before, const TimeStepperState& after) const {
  const ChannelMesh& mesh = problem_.mesh;
  const ConstitutiveParams& p = problem_.params;
  const CellBasis b = make_cell_basis(mesh);
  const SparseMatrix mass = mass_matrix(mesh);
  const Eigen::VectorXd& v = after.v;
  const Eigen::VectorXd& v0 = h_.fixed_values;
  const Eigen::VectorXd w_new = v - v0, w_old = before.v - v0;
  std::vector<Eigen::Vector2d> points;
  if (problem_.forcing) points = quadrature_points(mesh);

  double diss = 0.0, cross = 0.0, work = 0.0, conv = 0.0, pen = 0.0;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    for (int q = 0; q < 4; ++q) {
      const PointState s = point_state(b, mesh.cells[c], v, q);
      const PointState s0 = point_state(b, mesh.cells[c], v0, q);
      const SymTensor2<double> S = stress_bulk(s.sym(), p, false);
      diss += b.weight * contract(S, s.sym());
      cross += b.weight * contract(S, s0.sym());
      conv += b.weight * curl_cross_point(s.omega(), s.v).dot(s0.v);
      if (problem_.forcing) work += b.weight * problem_.forcing(after.t, points[4 * c + q]).dot(s.v - s0.v);
    }
    double dm = 0.0;
    for (int a = 0; a < 4; ++a)
      dm += b.mean_dndx[a] * v[2 * mesh.cells[c][a]] + b.mean_dndy[a] * v[2 * mesh.cells[c][a] + 1];
    pen += 2.0 * opts_.kappa * b.area * dm * dm;
  }
  double wall = 0.0, wall_cross = 0.0;
  for (const auto& e : mesh.edges) {
    if (e.tag != BoundaryTag::wall) continue;
    for (double s : kEdgePoints) {
      const Eigen::Vector2d vq = (1.0 - s) * v.segment<2>(2 * e.a) + s * v.segment<2>(2 * e.b);
      const Eigen::Vector2d v0q = (1.0 - s) * v0.segment<2>(2 * e.a) + s * v0.segment<2>(2 * e.b);
      const Eigen::Vector2d sv = stress_boundary(vq, p, false);
      wall += 0.5 * e.length * sv.dot(vq);
      wall_cross += 0.5 * e.length * sv.dot(v0q);
    }
  }
  const double h = after.t - before.t;
  EnergyLedgerEntry out;
  out.t = after.t;
  out.lhs = 0.5 * w_new.dot(mass * w_new) + h * (diss + wall + pen);
  out.rhs = 0.5 * w_old.dot(mass * w_old) + h * (work + cross + wall_cross - conv);
  return out;
}

ReferenceRun solve_reference(const FlowProblem& problem, double t_end, double h, const ReferenceOptions& opts) {
  if (!(t_end > 0.0) || !(h > 0.0)) throw std::invalid_argument("horizon and step must be positive");
  const int steps = std::max(1, static_cast<int>(std::lround(t_end / h)));
  const double ht = t_end / steps;
  const ReferenceSolver solver(problem, opts);
  ReferenceRun run;
  run.trajectory.t = Eigen::VectorXd::LinSpaced(steps + 1, 0.0, t_end);
  run.trajectory.v.resize(problem.mesh.dof_count(), steps + 1);
  TimeStepperState s = solver.initial_state(ht);
  run.trajectory.v.col(0) = s.v;
  for (int k = 1; k <= steps; ++k) {
    TimeStepperState next = solver.step(s);
    next.t = run.trajectory.t[k];
    run.ledger.push_back(solver.ledger(s, next));
    run.max_picard_iterations = std::max(run.max_picard_iterations, next.picard_iterations);
    run.trajectory.v.col(k) = next.v;
    s = std::move(next);
  }
  return run;
}

}  // namespace wide
