#include "wide/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wide/assembly.hpp"

namespace wide {

CellBasis make_cell_basis(const ChannelMesh& mesh) {
  CellBasis b;
  const double g = 1.0 / std::sqrt(3.0);
  const double xi_pts[4] = {-g, g, g, -g};
  const double eta_pts[4] = {-g, -g, g, g};
  const double xa[4] = {-1.0, 1.0, 1.0, -1.0};
  const double ya[4] = {-1.0, -1.0, 1.0, 1.0};
  for (int q = 0; q < 4; ++q) {
    const double xi = xi_pts[q], eta = eta_pts[q];
    for (int a = 0; a < 4; ++a) {
      b.n[q][a] = 0.25 * (1.0 + xa[a] * xi) * (1.0 + ya[a] * eta);
      b.dndx[q][a] = 0.25 * xa[a] * (1.0 + ya[a] * eta) * 2.0 / mesh.hx;
      b.dndy[q][a] = 0.25 * ya[a] * (1.0 + xa[a] * xi) * 2.0 / mesh.hy;
    }
    b.offset[q] = {0.5 * mesh.hx * (1.0 + xi), 0.5 * mesh.hy * (1.0 + eta)};
  }
  for (int a = 0; a < 4; ++a) {
    b.mean_dndx[a] = 0.5 * xa[a] / mesh.hx;
    b.mean_dndy[a] = 0.5 * ya[a] / mesh.hy;
  }
  b.area = mesh.hx * mesh.hy;
  b.weight = 0.25 * b.area;
  return b;
}

PointState point_state(const CellBasis& basis, const std::array<int, 4>& cell, const Eigen::VectorXd& field, int q) {
  PointState s;
  s.v.setZero();
  s.grad.setZero();
  for (int a = 0; a < 4; ++a) {
    const double u = field[2 * cell[a]], w = field[2 * cell[a] + 1];
    s.v.x() += basis.n[q][a] * u;
    s.v.y() += basis.n[q][a] * w;
    s.grad(0, 0) += basis.dndx[q][a] * u;
    s.grad(0, 1) += basis.dndy[q][a] * u;
    s.grad(1, 0) += basis.dndx[q][a] * w;
    s.grad(1, 1) += basis.dndy[q][a] * w;
  }
  return s;
}

namespace {

void check_size(const ChannelMesh& mesh, const Eigen::VectorXd& field) {
  if (field.size() != mesh.dof_count())
    throw std::invalid_argument("dof vector has size " + std::to_string(field.size()) + ", mesh expects " +
                                std::to_string(mesh.dof_count()));
}

template <class F>
void for_each_point(const ChannelMesh& mesh, const Eigen::VectorXd& field, F&& f) {
  check_size(mesh, field);
  const CellBasis basis = make_cell_basis(mesh);
  for (int c = 0; c < mesh.cell_count(); ++c)
    for (int q = 0; q < 4; ++q) f(point_state(basis, mesh.cells[c], field, q));
}

}  // namespace

std::vector<SymTensor2<double>> sym_gradient(const ChannelMesh& mesh, const Eigen::VectorXd& field) {
  std::vector<SymTensor2<double>> out;
  out.reserve(4 * mesh.cell_count());
  for_each_point(mesh, field, [&](const PointState& s) { out.push_back(s.sym()); });
  return out;
}

Eigen::VectorXd divergence(const ChannelMesh& mesh, const Eigen::VectorXd& field) {
  Eigen::VectorXd out(4 * mesh.cell_count());
  int k = 0;
  for_each_point(mesh, field, [&](const PointState& s) { out[k++] = s.div(); });
  return out;
}

std::vector<Eigen::Vector2d> curl_cross(const ChannelMesh& mesh, const Eigen::VectorXd& field) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(4 * mesh.cell_count());
  for_each_point(mesh, field, [&](const PointState& s) { out.push_back(curl_cross_point(s.omega(), s.v)); });
  return out;
}

std::vector<Eigen::Vector2d> quadrature_points(const ChannelMesh& mesh) {
  const CellBasis basis = make_cell_basis(mesh);
  std::vector<Eigen::Vector2d> out;
  out.reserve(4 * mesh.cell_count());
  for (const auto& c : mesh.cells)
    for (int q = 0; q < 4; ++q) out.push_back(mesh.nodes[c[0]] + basis.offset[q]);
  return out;
}

Eigen::VectorXd Trajectory::at(double time) const {
  const int m = slabs();
  if (m <= 0 || time <= t[0]) return v.col(0);
  if (time >= t[m]) return v.col(m);
  const int k = static_cast<int>(std::upper_bound(t.begin(), t.end(), time) - t.begin()) - 1;
  if (time == t[k]) return v.col(k);
  const double theta = (time - t[k]) / (t[k + 1] - t[k]);
  return (1.0 - theta) * v.col(k) + theta * v.col(k + 1);
}

Trajectory steady_trajectory(const Eigen::VectorXd& field, double horizon, int slabs) {
  Trajectory tr;
  tr.t = Eigen::VectorXd::LinSpaced(slabs + 1, 0.0, horizon);
  tr.v = field.replicate(1, slabs + 1);
  return tr;
}

TimeQuadrature exp_weight_quadrature(double eps, const Eigen::VectorXd& grid) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const int m = static_cast<int>(grid.size()) - 1;
  TimeQuadrature tq;
  tq.weights.resize(m);
  tq.midpoints.resize(m);
  for (int k = 0; k < m; ++k) {
    const double h = grid[k + 1] - grid[k];
    tq.weights[k] = -eps * std::exp(-grid[k] / eps) * std::expm1(-h / eps);
    tq.midpoints[k] = 0.5 * (grid[k] + grid[k + 1]);
  }
  return tq;
}

std::vector<Eigen::Vector2d> wide_material_derivative(const Trajectory& traj, int slab, const ChannelMesh& mesh,
                                                      Convection form) {
  if (slab < 0 || slab >= traj.slabs()) throw std::out_of_range("slab index out of range");
  const Eigen::VectorXd mid = 0.5 * (traj.v.col(slab) + traj.v.col(slab + 1));
  const Eigen::VectorXd rate = (traj.v.col(slab + 1) - traj.v.col(slab)) / (traj.t[slab + 1] - traj.t[slab]);
  check_size(mesh, mid);
  const CellBasis basis = make_cell_basis(mesh);
  std::vector<Eigen::Vector2d> out;
  out.reserve(4 * mesh.cell_count());
  for (const auto& c : mesh.cells)
    for (int q = 0; q < 4; ++q) {
      const PointState s = point_state(basis, c, mid, q);
      Eigen::Vector2d dv = Eigen::Vector2d::Zero();
      for (int a = 0; a < 4; ++a) dv += basis.n[q][a] * rate.segment<2>(2 * c[a]);
      if (form == Convection::rotational)
        out.push_back(dv + curl_cross_point(s.omega(), s.v));
      else
        out.push_back(dv + s.grad * s.v);
    }
  return out;
}

double l2_distance(const ChannelMesh& mesh, const Trajectory& a, const Trajectory& b, double t_end) {
  const Eigen::SparseMatrix<double> mass = mass_matrix(mesh);
  double acc = 0.0;
  for (int k = 0; k < a.slabs(); ++k) {
    if (a.t[k] >= t_end - 1e-12) break;
    const double t1 = std::min(a.t[k + 1], t_end);
    const double h = t1 - a.t[k];
    const Eigen::VectorXd d0 = a.v.col(k) - b.at(a.t[k]);
    const double theta = h / (a.t[k + 1] - a.t[k]);
    const Eigen::VectorXd d1 = (1.0 - theta) * a.v.col(k) + theta * a.v.col(k + 1) - b.at(t1);
    acc += 0.5 * h * (d0.dot(mass * d0) + d1.dot(mass * d1));
  }
  return std::sqrt(acc);
}

double l2_norm(const ChannelMesh& mesh, const Trajectory& a, double t_end) {
  Trajectory zero;
  zero.t = a.t;
  zero.v = Eigen::MatrixXd::Zero(a.v.rows(), a.v.cols());
  return l2_distance(mesh, a, zero, t_end);
}

}  // namespace wide
