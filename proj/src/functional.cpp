#include "wide/functional.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wide {

ConstraintHandler make_constraint_handler(const FlowProblem& problem, double kappa) {
  const ChannelMesh& mesh = problem.mesh;
  if (problem.extension.velocity.size() != mesh.dof_count())
    throw std::invalid_argument("extension field does not match mesh");
  if (!(kappa >= 0.0)) throw std::invalid_argument("penalty weight must be nonnegative");
  ConstraintHandler h;
  h.fixed = mesh.fixed_dofs();
  h.fixed_values = problem.extension.velocity;
  h.initial = problem.extension.velocity;
  h.kappa = kappa;
  for (int i = 0; i < mesh.outlet_count; ++i) {
    Eigen::VectorXd row = mesh.flux_row(i);
    Eigen::VectorXd free = row;
    for (int d = 0; d < mesh.dof_count(); ++d)
      if (h.fixed[d]) free[d] = 0.0;
    if (free.squaredNorm() == 0.0) throw std::invalid_argument("singular flux constraint for outlet " + std::to_string(i));
    h.flux_rows.push_back(std::move(row));
    h.free_flux_rows.push_back(std::move(free));
  }
  return h;
}

namespace {

// Removes the flux components of w; outlet supports are disjoint, so the
// rows are orthogonal and one pass is the exact projection.
void remove_flux(Eigen::Ref<Eigen::VectorXd> w, const ConstraintHandler& h) {
  for (const auto& c : h.free_flux_rows) w -= c * (c.dot(w) / c.squaredNorm());
}

}  // namespace

Eigen::MatrixXd project_admissible(const Eigen::MatrixXd& v, const ConstraintHandler& h) {
  const int n = static_cast<int>(h.fixed.size());
  if (v.rows() != n) throw std::invalid_argument("trajectory rows do not match the constraint handler");
  Eigen::MatrixXd out(v.rows(), v.cols());
  if (v.cols() == 0) return out;
  out.col(0) = h.initial;
  for (int k = 1; k < v.cols(); ++k) {
    Eigen::VectorXd w = v.col(k) - h.fixed_values;
    for (int d = 0; d < n; ++d)
      if (h.fixed[d]) w[d] = 0.0;
    remove_flux(w, h);
    out.col(k) = h.fixed_values + w;
  }
  return out;
}

void project_direction(Eigen::MatrixXd& d, const ConstraintHandler& h) {
  const int n = static_cast<int>(h.fixed.size());
  if (d.rows() != n) throw std::invalid_argument("direction rows do not match the constraint handler");
  if (d.cols() == 0) return;
  d.col(0).setZero();
  for (int k = 1; k < d.cols(); ++k) {
    for (int i = 0; i < n; ++i)
      if (h.fixed[i]) d(i, k) = 0.0;
    remove_flux(d.col(k), h);
  }
}

double flux_residual(const Eigen::MatrixXd& v, const ConstraintHandler& h) {
  double worst = 0.0;
  for (int k = 0; k < v.cols(); ++k) {
    const Eigen::VectorXd w = v.col(k) - h.fixed_values;
    for (const auto& c : h.flux_rows) worst = std::max(worst, std::abs(c.dot(w)));
  }
  return worst;
}

namespace {

void check_admissible(const Trajectory& traj, const ConstraintHandler& h) {
  if (traj.v.cols() != traj.t.size()) throw std::invalid_argument("trajectory time grid and samples disagree");
  if (traj.slabs() < 1) throw std::invalid_argument("trajectory needs at least one slab");
  const double scale = std::max(1.0, h.fixed_values.lpNorm<Eigen::Infinity>());
  if ((traj.v.col(0) - h.initial).lpNorm<Eigen::Infinity>() > 1e-12 * scale)
    throw std::invalid_argument("trajectory violates the initial condition");
  for (int k = 1; k < traj.v.cols(); ++k)
    for (int d = 0; d < traj.v.rows(); ++d)
      if (h.fixed[d] && std::abs(traj.v(d, k) - h.fixed_values[d]) > 1e-12 * scale)
        throw std::invalid_argument("trajectory violates a prescribed boundary value");
  const double res = flux_residual(traj.v, h);
  if (res > 1e-10 * scale) throw std::invalid_argument("trajectory violates flux constraints (residual " +
                                                       std::to_string(res) + "); project it first");
}

struct WallEdge {
  int a, b;
  double length;
};

}  // namespace

FunctionalEval evaluate_unchecked(const Trajectory& traj, const FlowProblem& problem, double kappa,
                                  bool with_gradient) {
  const ChannelMesh& mesh = problem.mesh;
  const ConstitutiveParams& p = problem.params;
  const int n = mesh.dof_count();
  if (traj.v.rows() != n) throw std::invalid_argument("trajectory rows do not match mesh dofs");
  const int m = traj.slabs();
  const double eps = p.eps;
  const TimeQuadrature tq = exp_weight_quadrature(eps, traj.t);
  const CellBasis b = make_cell_basis(mesh);
  const bool rotational = problem.convection == Convection::rotational;

  std::vector<WallEdge> walls;
  for (const auto& e : mesh.edges)
    if (e.tag == BoundaryTag::wall) walls.push_back({e.a, e.b, e.length});

  // Gauss point offsets are cell independent on a uniform grid.
  std::vector<Eigen::Vector2d> points;
  if (problem.forcing) points = quadrature_points(mesh);

  FunctionalEval out;
  if (with_gradient) out.gradient = Eigen::MatrixXd::Zero(n, m + 1);

  Eigen::VectorXd mid(n), rate(n), gmid(n), grate(n);
  for (int k = 0; k < m; ++k) {
    const double h = traj.t[k + 1] - traj.t[k];
    const double wk = tq.weights[k];
    if (wk == 0.0) continue;
    const double tm = tq.midpoints[k];
    mid = 0.5 * (traj.v.col(k) + traj.v.col(k + 1));
    rate = (traj.v.col(k + 1) - traj.v.col(k)) / h;
    if (with_gradient) {
      gmid.setZero();
      grate.setZero();
    }
    double inertia = 0.0, forcing = 0.0, bulk = 0.0, boundary = 0.0, penalty = 0.0;

    for (int c = 0; c < mesh.cell_count(); ++c) {
      const auto& cell = mesh.cells[c];
      double u[4], w[4], du[4], dw[4];
      for (int a = 0; a < 4; ++a) {
        u[a] = mid[2 * cell[a]];
        w[a] = mid[2 * cell[a] + 1];
        du[a] = rate[2 * cell[a]];
        dw[a] = rate[2 * cell[a] + 1];
      }
      double gm[8] = {0, 0, 0, 0, 0, 0, 0, 0};
      double gr[8] = {0, 0, 0, 0, 0, 0, 0, 0};

      for (int q = 0; q < 4; ++q) {
        const auto& N = b.n[q];
        const auto& Nx = b.dndx[q];
        const auto& Ny = b.dndy[q];
        double v1 = 0, v2 = 0, d1 = 0, d2 = 0, ux = 0, uy = 0, wx = 0, wy = 0;
        for (int a = 0; a < 4; ++a) {
          v1 += N[a] * u[a];
          v2 += N[a] * w[a];
          d1 += N[a] * du[a];
          d2 += N[a] * dw[a];
          ux += Nx[a] * u[a];
          uy += Ny[a] * u[a];
          wx += Nx[a] * w[a];
          wy += Ny[a] * w[a];
        }
        const double omega = wx - uy;
        double r1, r2;
        if (rotational) {
          r1 = d1 - omega * v2;
          r2 = d2 + omega * v1;
        } else {
          r1 = d1 + ux * v1 + uy * v2;
          r2 = d2 + wx * v1 + wy * v2;
        }
        const double qw = wk * b.weight;
        inertia += qw * 0.5 * eps * (r1 * r1 + r2 * r2);

        const SymTensor2<double> D{ux, 0.5 * (uy + wx), wy};
        const BulkEvaluation be = evaluate_bulk(D, p, true);
        bulk += qw * be.potential;

        double f1 = 0.0, f2 = 0.0;
        if (problem.forcing) {
          const Eigen::Vector2d f = problem.forcing(tm, points[4 * c + q]);
          f1 = f.x();
          f2 = f.y();
          forcing -= qw * (f1 * v1 + f2 * v2);
        }

        if (!with_gradient) continue;
        const double a1 = qw * eps * r1, a2 = qw * eps * r2;
        const double S11 = qw * be.stress.xx, S12 = qw * be.stress.xy, S22 = qw * be.stress.yy;
        for (int a = 0; a < 4; ++a) {
          double gu = S11 * Nx[a] + S12 * Ny[a] - qw * f1 * N[a];
          double gw = S12 * Nx[a] + S22 * Ny[a] - qw * f2 * N[a];
          if (rotational) {
            const double aj = -a1 * v2 + a2 * v1;
            gu += -aj * Ny[a] + omega * a2 * N[a];
            gw += aj * Nx[a] - omega * a1 * N[a];
          } else {
            const double vgn = v1 * Nx[a] + v2 * Ny[a];
            gu += N[a] * (a1 * ux + a2 * wx) + a1 * vgn;
            gw += N[a] * (a1 * uy + a2 * wy) + a2 * vgn;
          }
          gm[2 * a] += gu;
          gm[2 * a + 1] += gw;
          gr[2 * a] += a1 * N[a];
          gr[2 * a + 1] += a2 * N[a];
        }
      }

      if (kappa > 0.0) {
        double dm = 0.0;
        for (int a = 0; a < 4; ++a) dm += b.mean_dndx[a] * u[a] + b.mean_dndy[a] * w[a];
        penalty += wk * kappa * b.area * dm * dm;
        if (with_gradient) {
          const double s = 2.0 * wk * kappa * b.area * dm;
          for (int a = 0; a < 4; ++a) {
            gm[2 * a] += s * b.mean_dndx[a];
            gm[2 * a + 1] += s * b.mean_dndy[a];
          }
        }
      }

      if (with_gradient)
        for (int i = 0; i < 8; ++i) {
          const int dof = 2 * cell[i / 2] + i % 2;
          gmid[dof] += gm[i];
          grate[dof] += gr[i];
        }
    }

    for (const auto& e : walls) {
      for (double s : kEdgePoints) {
        const double na = 1.0 - s, nb = s;
        const Eigen::Vector2d vq = na * mid.segment<2>(2 * e.a) + nb * mid.segment<2>(2 * e.b);
        const double qw = wk * 0.5 * e.length;
        boundary += qw * potential_boundary(vq, p, true);
        if (with_gradient) {
          const Eigen::Vector2d sv = qw * stress_boundary(vq, p, true);
          gmid.segment<2>(2 * e.a) += na * sv;
          gmid.segment<2>(2 * e.b) += nb * sv;
        }
      }
    }

    out.inertia += inertia;
    out.forcing += forcing;
    out.bulk += bulk;
    out.boundary += boundary;
    out.penalty += penalty;
    if (with_gradient) {
      out.gradient.col(k) += 0.5 * gmid - grate / h;
      out.gradient.col(k + 1) += 0.5 * gmid + grate / h;
    }
  }
  out.value = out.breakdown_sum();
  return out;
}

FunctionalEval evaluate(const Trajectory& traj, const FlowProblem& problem, const ConstraintHandler& h) {
  check_admissible(traj, h);
  return evaluate_unchecked(traj, problem, h.kappa, false);
}

FunctionalEval evaluate_with_gradient(const Trajectory& traj, const FlowProblem& problem,
                                      const ConstraintHandler& h) {
  check_admissible(traj, h);
  FunctionalEval e = evaluate_unchecked(traj, problem, h.kappa, true);
  project_direction(e.gradient, h);
  return e;
}

Eigen::MatrixXd gradient(const Trajectory& traj, const FlowProblem& problem, const ConstraintHandler& h) {
  return evaluate_with_gradient(traj, problem, h).gradient;
}

El2Residual el2_residual(const Trajectory& traj, const FlowProblem& problem, const ConstraintHandler& h,
                         const std::vector<Eigen::MatrixXd>& tests) {
  const Eigen::MatrixXd g = gradient(traj, problem, h);
  const double eps = problem.params.eps;
  El2Residual out;
  out.residual.resize(static_cast<Eigen::Index>(tests.size()));
  out.test_norm.resize(static_cast<Eigen::Index>(tests.size()));
  for (std::size_t j = 0; j < tests.size(); ++j) {
    const Eigen::MatrixXd& pi = tests[j];
    if (pi.rows() != g.rows() || pi.cols() != g.cols())
      throw std::invalid_argument("test field does not match the trajectory shape");
    Eigen::MatrixXd tangent = pi;
    project_direction(tangent, h);
    if ((tangent - pi).lpNorm<Eigen::Infinity>() > 1e-12 * std::max(1.0, pi.lpNorm<Eigen::Infinity>()))
      throw std::invalid_argument("test field is not an admissible variation");
    double r = 0.0, nrm = 0.0;
    for (int k = 0; k < g.cols(); ++k) {
      if (pi.col(k).squaredNorm() == 0.0) continue;
      const double t = traj.t[k];
      r += std::exp(t / eps) * g.col(k).dot(pi.col(k));
      nrm += std::exp(t / eps) * pi.col(k).squaredNorm();
    }
    out.residual[j] = r;
    out.test_norm[j] = std::sqrt(nrm);
  }
  return out;
}

Eigen::MatrixXd random_direction(const ConstraintHandler& h, int time_nodes, std::mt19937_64& rng, bool pinned_end) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd d(static_cast<Eigen::Index>(h.fixed.size()), time_nodes);
  for (Eigen::Index k = 0; k < d.cols(); ++k)
    for (Eigen::Index i = 0; i < d.rows(); ++i) d(i, k) = normal(rng);
  if (pinned_end && time_nodes > 0) d.col(time_nodes - 1).setZero();
  project_direction(d, h);
  return d;
}

double divergence_norm(const ChannelMesh& mesh, const Trajectory& traj, double t_end) {
  double acc = 0.0;
  for (int k = 0; k < traj.slabs(); ++k) {
    if (traj.t[k + 1] > t_end + 1e-12) break;
    const double h = traj.t[k + 1] - traj.t[k];
    const double d0 = cell_divergence(mesh, traj.v.col(k)).squaredNorm();
    const double d1 = cell_divergence(mesh, traj.v.col(k + 1)).squaredNorm();
    acc += 0.5 * h * mesh.cell_area() * (d0 + d1);
  }
  return std::sqrt(acc);
}

}  // namespace wide
