#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

#include "wide/assembly.hpp"
#include "wide/diagnostics.hpp"

namespace wide {

double PressureField::mean_defect(const ChannelMesh& mesh) const {
  double worst = 0.0;
  for (int k = 0; k < p.cols(); ++k) worst = std::max(worst, std::abs(mesh.cell_area() * p.col(k).sum() - d[k]));
  return worst;
}

namespace {

// Momentum residual of one slab at its midpoint, as a dof vector:
// int (rot v x v).phi + S(Dv):D phi + int_walls s(v).phi - f.phi.
Eigen::VectorXd slab_residual(const FlowProblem& problem, const Eigen::VectorXd& v, double t,
                              const CellBasis& b, const std::vector<Eigen::Vector2d>& points) {
  const ChannelMesh& mesh = problem.mesh;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(mesh.dof_count());
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto& cell = mesh.cells[c];
    for (int q = 0; q < 4; ++q) {
      const PointState s = point_state(b, cell, v, q);
      const Eigen::Vector2d cc = curl_cross_point(s.omega(), s.v);
      const SymTensor2<double> S = stress_bulk(s.sym(), problem.params, false);
      Eigen::Vector2d f = Eigen::Vector2d::Zero();
      if (problem.forcing) f = problem.forcing(t, points[4 * c + q]);
      const Eigen::Vector2d body = cc - f;
      for (int a = 0; a < 4; ++a) {
        const double N = b.n[q][a], Nx = b.dndx[q][a], Ny = b.dndy[q][a];
        r[2 * cell[a]] += b.weight * (body.x() * N + S.xx * Nx + S.xy * Ny);
        r[2 * cell[a] + 1] += b.weight * (body.y() * N + S.xy * Nx + S.yy * Ny);
      }
    }
  }
  for (const auto& e : mesh.edges) {
    if (e.tag != BoundaryTag::wall) continue;
    for (double s : kEdgePoints) {
      const Eigen::Vector2d vq = (1.0 - s) * v.segment<2>(2 * e.a) + s * v.segment<2>(2 * e.b);
      const Eigen::Vector2d sv = 0.5 * e.length * stress_boundary(vq, problem.params, false);
      r.segment<2>(2 * e.a) += (1.0 - s) * sv;
      r.segment<2>(2 * e.b) += s * sv;
    }
  }
  return r;
}

Eigen::VectorXd cell_kinetic(const ChannelMesh& mesh, const CellBasis& b, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(mesh.cell_count());
  for (int c = 0; c < mesh.cell_count(); ++c) {
    double acc = 0.0;
    for (int q = 0; q < 4; ++q) acc += 0.5 * point_state(b, mesh.cells[c], v, q).v.squaredNorm();
    out[c] = 0.25 * acc;
  }
  return out;
}

}  // namespace

PressureField reconstruct_pressure(const Trajectory& traj, const FlowProblem& problem, const Eigen::VectorXd& d,
                                   const PressureOptions& opts) {
  const ChannelMesh& mesh = problem.mesh;
  const int n = mesh.dof_count();
  const int nc = mesh.cell_count();
  const int nt = static_cast<int>(traj.t.size());
  if (traj.v.rows() != n || traj.v.cols() != nt) throw std::invalid_argument("trajectory does not match mesh");
  if (d.size() != 0 && d.size() != nt) throw std::invalid_argument("pressure mean needs one sample per time node");

  const std::vector<bool> fixed = mesh.fixed_dofs();
  std::vector<int> index(n, -1);
  int nf = 0;
  for (int i = 0; i < n; ++i)
    if (!fixed[i]) index[i] = nf++;
  const int nout = mesh.outlet_count;
  const int size = nf + nc + 1 + nout;

  // Saddle system on the free, zero-flux velocity space:
  //   (grad u, grad phi) + (u, phi) - (Q, div phi) + sum lambda_i flux_i(phi) = <g, phi>
  //   -(q, div u) - delta J(Q, q) + mu (q, 1) = 0,   (Q, 1) = 0,   flux_i(u) = 0.
  const SparseMatrix a = laplace_matrix(mesh) + mass_matrix(mesh);
  const SparseMatrix div = divergence_matrix(mesh);
  std::vector<Eigen::Triplet<double>> trip;
  for (int col = 0; col < a.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(a, col); it; ++it)
      if (index[it.row()] >= 0 && index[it.col()] >= 0) trip.emplace_back(index[it.row()], index[it.col()], it.value());
  for (int col = 0; col < div.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(div, col); it; ++it) {
      if (index[it.col()] < 0) continue;
      trip.emplace_back(index[it.col()], nf + it.row(), -it.value());
      trip.emplace_back(nf + it.row(), index[it.col()], -it.value());
    }
  const double area = mesh.cell_area();
  auto jump = [&](int c1, int c2, double length, double across) {
    const double w = opts.stabilization * across * length;
    trip.emplace_back(nf + c1, nf + c1, -w);
    trip.emplace_back(nf + c2, nf + c2, -w);
    trip.emplace_back(nf + c1, nf + c2, w);
    trip.emplace_back(nf + c2, nf + c1, w);
  };
  for (int j = 0; j < mesh.ny; ++j)
    for (int i = 0; i < mesh.nx; ++i) {
      const int c = j * mesh.nx + i;
      if (i + 1 < mesh.nx) jump(c, c + 1, mesh.hy, mesh.hx);
      if (j + 1 < mesh.ny) jump(c, c + mesh.nx, mesh.hx, mesh.hy);
    }
  for (int c = 0; c < nc; ++c) {
    trip.emplace_back(nf + c, nf + nc, area);
    trip.emplace_back(nf + nc, nf + c, area);
  }
  for (int i = 0; i < nout; ++i) {
    const Eigen::VectorXd row = mesh.flux_row(i);
    for (int dof = 0; dof < n; ++dof) {
      if (index[dof] < 0 || row[dof] == 0.0) continue;
      trip.emplace_back(index[dof], nf + nc + 1 + i, row[dof]);
      trip.emplace_back(nf + nc + 1 + i, index[dof], row[dof]);
    }
  }
  SparseMatrix sys(size, size);
  sys.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(sys);
  if (lu.info() != Eigen::Success) throw std::runtime_error("pressure reconstruction: singular saddle system");

  const CellBasis b = make_cell_basis(mesh);
  std::vector<Eigen::Vector2d> points;
  if (problem.forcing) points = quadrature_points(mesh);
  const SparseMatrix mass = mass_matrix(mesh);

  PressureField out;
  out.t = traj.t;
  out.d = d.size() ? d : Eigen::VectorXd::Zero(nt);
  out.p.resize(nc, nt);
  out.q.resize(nc, nt);
  out.k.resize(nc, nt);

  Eigen::VectorXd accumulated = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd kin_prev = cell_kinetic(mesh, b, traj.v.col(0));
  Eigen::VectorXd kint = Eigen::VectorXd::Zero(nc);
  Eigen::VectorXd rhs(size);
  for (int k = 0; k < nt; ++k) {
    if (k > 0) {
      const double h = traj.t[k] - traj.t[k - 1];
      const Eigen::VectorXd mid = 0.5 * (traj.v.col(k - 1) + traj.v.col(k));
      accumulated += h * slab_residual(problem, mid, 0.5 * (traj.t[k - 1] + traj.t[k]), b, points);
      const Eigen::VectorXd kin = cell_kinetic(mesh, b, traj.v.col(k));
      kint += 0.5 * h * (kin_prev + kin);
      kin_prev = kin;
    }
    const Eigen::VectorXd g = mass * (traj.v.col(k) - traj.v.col(0)) + accumulated;
    rhs.setZero();
    for (int i = 0; i < n; ++i)
      if (index[i] >= 0) rhs[index[i]] = g[i];
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd qk = sol.segment(nf, nc);
    out.q.col(k) = qk;
    out.k.col(k) = kint;
    out.p.col(k) = -(qk + kint) + Eigen::VectorXd::Constant(nc, kint.mean() + out.d[k] / mesh.area());
  }
  return out;
}

}  // namespace wide
