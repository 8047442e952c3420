#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wide/assembly.hpp"
#include "wide/diagnostics.hpp"

namespace wide {

double TimeBump::operator()(double t) const {
  const double s = (2.0 * t - a - b) / (b - a);
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

std::vector<TimeBump> default_time_bumps(double t_obs) {
  return {{0.2 * t_obs, 0.8 * t_obs}, {0.1 * t_obs, 0.6 * t_obs}, {0.4 * t_obs, 0.9 * t_obs}};
}

namespace {

// Chains of consecutive boundary edges sharing a tag (and outlet index), as
// ordered node lists.
struct Chain {
  std::vector<int> nodes;
  Eigen::Vector2d tangent;
  Eigen::Vector2d normal;
};

std::vector<Chain> chains(const ChannelMesh& mesh, BoundaryTag tag, int outlet) {
  std::vector<Chain> out;
  int last = -2;
  for (int k = 0; k < static_cast<int>(mesh.edges.size()); ++k) {
    const auto& e = mesh.edges[k];
    const bool match = e.tag == tag && (tag != BoundaryTag::outflow || outlet < 0 || e.outlet == outlet);
    if (!match) continue;
    if (last == k - 1 && out.back().nodes.back() == e.a) {
      out.back().nodes.push_back(e.b);
    } else {
      Chain c;
      c.nodes = {e.a, e.b};
      c.tangent = (mesh.nodes[e.b] - mesh.nodes[e.a]).normalized();
      c.normal = e.normal;
      out.push_back(c);
    }
    last = k;
  }
  return out;
}

Chain outlet_chain(const ChannelMesh& mesh, int outlet) {
  const auto cs = chains(mesh, BoundaryTag::outflow, outlet);
  if (cs.size() != 1) throw std::invalid_argument("outlet " + std::to_string(outlet) + " is not a single chain");
  return cs.front();
}

template <class F>
Eigen::VectorXd chain_field(const ChannelMesh& mesh, const Chain& c, const Eigen::Vector2d& dir, F&& shape) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(mesh.dof_count());
  const int last = static_cast<int>(c.nodes.size()) - 1;
  for (int j = 0; j <= last; ++j) w.segment<2>(2 * c.nodes[j]) = shape(static_cast<double>(j) / last) * dir;
  return w;
}

}  // namespace

Eigen::VectorXd outlet_multiplier(const ChannelMesh& mesh, int outlet, int kind) {
  const Chain c = outlet_chain(mesh, outlet);
  const double pi = std::numbers::pi;
  Eigen::VectorXd eta = chain_field(mesh, c, c.normal, [&](double s) {
    switch (kind) {
      case 0:
        return std::sin(pi * s);
      case 1:
        return s * (1.0 - s);
      case 2:
        return std::pow(std::sin(pi * s), 2);
      default:
        throw std::invalid_argument("unknown multiplier kind");
    }
  });
  // Exact zeros at the ends, whatever sin(pi) rounds to.
  eta.segment<2>(2 * c.nodes.front()).setZero();
  eta.segment<2>(2 * c.nodes.back()).setZero();
  return eta / mesh.flux_row(outlet).dot(eta);
}

BoundaryTestSet default_boundary_tests(const ChannelMesh& mesh, const std::vector<Eigen::VectorXd>& eta) {
  const double pi = std::numbers::pi;
  BoundaryTestSet set;
  for (const Chain& c : chains(mesh, BoundaryTag::wall, -1))
    for (int m = 1; m <= 3; ++m) {
      Eigen::VectorXd w = chain_field(mesh, c, c.tangent, [&](double s) { return std::sin(m * pi * s); });
      w.segment<2>(2 * c.nodes.front()).setZero();
      w.segment<2>(2 * c.nodes.back()).setZero();
      set.wall.push_back(std::move(w));
    }
  for (int i = 0; i < mesh.outlet_count; ++i) {
    const Chain c = outlet_chain(mesh, i);
    const Eigen::VectorXd row = mesh.flux_row(i);
    std::vector<Eigen::VectorXd> raw;
    for (int m : {2, 4}) raw.push_back(chain_field(mesh, c, c.normal, [&](double s) { return std::sin(m * pi * s); }));
    for (int m : {1, 2}) raw.push_back(chain_field(mesh, c, c.tangent, [&](double s) { return std::sin(m * pi * s); }));
    for (auto& w : raw) {
      w.segment<2>(2 * c.nodes.front()).setZero();
      w.segment<2>(2 * c.nodes.back()).setZero();
      w -= eta.at(i) * row.dot(w);
      set.outlet.push_back(std::move(w));
    }
  }
  return set;
}

BoundaryPairing::BoundaryPairing(const Trajectory& traj, const FlowProblem& problem, const PressureField& pressure,
                                 const TimeBump& psi)
    : mesh_(problem.mesh) {
  const ChannelMesh& mesh = mesh_;
  const int nq = 4 * mesh.cell_count();
  if (!(psi.a > traj.t[0]) || !(psi.b < traj.horizon()))
    throw std::invalid_argument("time bump support must lie strictly inside the trajectory horizon");
  if (pressure.p.cols() != traj.t.size()) throw std::invalid_argument("pressure does not match trajectory");
  const CellBasis b = make_cell_basis(mesh);
  std::vector<Eigen::Vector2d> points;
  if (problem.forcing) points = quadrature_points(mesh);

  tensor_.assign(nq, Eigen::Matrix2d::Zero());
  div_.assign(nq, Eigen::Vector2d::Zero());
  std::vector<int> wall_edges, outlet_edges;
  for (int k = 0; k < static_cast<int>(mesh.edges.size()); ++k) {
    if (mesh.edges[k].tag == BoundaryTag::wall) wall_edges.push_back(k);
    if (mesh.edges[k].tag == BoundaryTag::outflow) outlet_edges.push_back(k);
  }
  friction_.assign(2 * wall_edges.size(), Eigen::Vector2d::Zero());
  dynamic_.assign(2 * outlet_edges.size(), 0.0);

  for (int k = 0; k < traj.slabs(); ++k) {
    const double t0 = traj.t[k], t1 = traj.t[k + 1];
    if (t1 <= psi.a || t0 >= psi.b) continue;
    const double h = t1 - t0, tm = 0.5 * (t0 + t1);
    const double dpsi = psi(t1) - psi(t0), pm = psi(tm);
    const Eigen::VectorXd mid = 0.5 * (traj.v.col(k) + traj.v.col(k + 1));
    for (int c = 0; c < mesh.cell_count(); ++c) {
      const double pc = 0.5 * (pressure.p(c, k) + pressure.p(c, k + 1));
      for (int q = 0; q < 4; ++q) {
        const PointState s = point_state(b, mesh.cells[c], mid, q);
        const SymTensor2<double> S = stress_bulk(s.sym(), problem.params, false);
        tensor_[4 * c + q] += pc * dpsi * Eigen::Matrix2d::Identity() + h * pm * S.matrix();
        Eigen::Vector2d f = Eigen::Vector2d::Zero();
        if (problem.forcing) f = problem.forcing(tm, points[4 * c + q]);
        div_[4 * c + q] += -dpsi * s.v + h * pm * (s.grad * s.v - f);
      }
    }
    for (std::size_t e = 0; e < wall_edges.size(); ++e) {
      const auto& ed = mesh.edges[wall_edges[e]];
      for (int g = 0; g < 2; ++g) {
        const double s = kEdgePoints[g];
        const Eigen::Vector2d vq = (1.0 - s) * mid.segment<2>(2 * ed.a) + s * mid.segment<2>(2 * ed.b);
        friction_[2 * e + g] += h * pm * stress_boundary(vq, problem.params, false);
      }
    }
    for (std::size_t e = 0; e < outlet_edges.size(); ++e) {
      const auto& ed = mesh.edges[outlet_edges[e]];
      for (int g = 0; g < 2; ++g) {
        const double s = kEdgePoints[g];
        const Eigen::Vector2d vq = (1.0 - s) * mid.segment<2>(2 * ed.a) + s * mid.segment<2>(2 * ed.b);
        dynamic_[2 * e + g] += h * pm * 0.5 * vq.squaredNorm();
      }
    }
  }

  // Discrete extension: minimizer of int |grad E|^2 + |E|^2 with the boundary
  // values prescribed, as a dense map from boundary to interior dofs.
  std::vector<bool> on_boundary(mesh.node_count(), false);
  for (const auto& e : mesh.edges) on_boundary[e.a] = on_boundary[e.b] = true;
  std::vector<int> boundary;
  for (int nd = 0; nd < mesh.node_count(); ++nd)
    for (int c = 0; c < 2; ++c) (on_boundary[nd] ? boundary : interior_).push_back(2 * nd + c);
  const Eigen::MatrixXd a(SparseMatrix(laplace_matrix(mesh) + mass_matrix(mesh)));
  const int ni = static_cast<int>(interior_.size()), nb = static_cast<int>(boundary.size());
  Eigen::MatrixXd aii(ni, ni), aib(ni, nb);
  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < ni; ++j) aii(i, j) = a(interior_[i], interior_[j]);
    for (int j = 0; j < nb; ++j) aib(i, j) = a(interior_[i], boundary[j]);
  }
  const Eigen::MatrixXd map = -aii.ldlt().solve(aib);
  extension_ = Eigen::MatrixXd::Zero(mesh.dof_count(), mesh.dof_count());
  for (int j = 0; j < nb; ++j) {
    extension_(boundary[j], boundary[j]) = 1.0;
    for (int i = 0; i < ni; ++i) extension_(interior_[i], boundary[j]) = map(i, j);
  }
}

Eigen::VectorXd BoundaryPairing::extension(const Eigen::VectorXd& w) const { return extension_ * w; }

double BoundaryPairing::pairing(const Eigen::VectorXd& w) const {
  const Eigen::VectorXd ew = extension(w);
  const CellBasis b = make_cell_basis(mesh_);
  double acc = 0.0;
  for (int c = 0; c < mesh_.cell_count(); ++c)
    for (int q = 0; q < 4; ++q) {
      const PointState s = point_state(b, mesh_.cells[c], ew, q);
      acc += b.weight * (div_[4 * c + q].dot(s.v) + (tensor_[4 * c + q].cwiseProduct(s.grad)).sum());
    }
  return acc;
}

double BoundaryPairing::wall_friction(const Eigen::VectorXd& w) const {
  double acc = 0.0;
  int e = 0;
  for (const auto& ed : mesh_.edges) {
    if (ed.tag != BoundaryTag::wall) continue;
    for (int g = 0; g < 2; ++g) {
      const double s = kEdgePoints[g];
      const Eigen::Vector2d wq = (1.0 - s) * w.segment<2>(2 * ed.a) + s * w.segment<2>(2 * ed.b);
      acc += 0.5 * ed.length * friction_[2 * e + g].dot(wq);
    }
    ++e;
  }
  return acc;
}

double BoundaryPairing::outlet_dynamic(const Eigen::VectorXd& w) const {
  double acc = 0.0;
  int e = 0;
  for (const auto& ed : mesh_.edges) {
    if (ed.tag != BoundaryTag::outflow) continue;
    for (int g = 0; g < 2; ++g) {
      const double s = kEdgePoints[g];
      const Eigen::Vector2d wq = (1.0 - s) * w.segment<2>(2 * ed.a) + s * w.segment<2>(2 * ed.b);
      acc += 0.5 * ed.length * dynamic_[2 * e + g] * ed.normal.dot(wq);
    }
    ++e;
  }
  return acc;
}

BoundaryReport boundary_report(const Trajectory& traj, const FlowProblem& problem, const PressureField& pressure,
                               const std::vector<TimeBump>& psi, const std::vector<std::vector<Eigen::VectorXd>>& eta) {
  const ChannelMesh& mesh = problem.mesh;
  if (static_cast<int>(eta.size()) != mesh.outlet_count)
    throw std::invalid_argument("need one multiplier list per outlet");
  std::vector<Eigen::VectorXd> first;
  for (const auto& list : eta) {
    if (list.empty()) throw std::invalid_argument("empty multiplier list");
    first.push_back(list.front());
  }
  const BoundaryTestSet tests = default_boundary_tests(mesh, first);
  const SparseMatrix bmass = boundary_mass_matrix(mesh, {BoundaryTag::wall}) +
                             boundary_mass_matrix(mesh, {BoundaryTag::outflow}) +
                             boundary_mass_matrix(mesh, {BoundaryTag::dirichlet});
  auto norm = [&](const Eigen::VectorXd& w) { return std::sqrt(w.dot(bmass * w)); };

  BoundaryReport rep;
  rep.psi = psi;
  rep.eta = eta;
  for (const TimeBump& bump : psi) {
    const BoundaryPairing bp(traj, problem, pressure, bump);
    double wall = 0.0, outlet = 0.0;
    for (const auto& w : tests.wall) wall = std::max(wall, std::abs(bp.pairing(w) + bp.wall_friction(w)) / norm(w));
    for (const auto& w : tests.outlet)
      outlet = std::max(outlet, std::abs(bp.pairing(w) - bp.outlet_dynamic(w)) / norm(w));
    rep.wall_residual.push_back(wall);
    rep.outlet_residual.push_back(outlet);
    std::vector<std::vector<double>> cs;
    for (const auto& list : eta) {
      std::vector<double> row;
      for (const auto& e : list) row.push_back(bp.pairing(e) - bp.outlet_dynamic(e));
      cs.push_back(std::move(row));
    }
    rep.c.push_back(std::move(cs));
  }
  return rep;
}

}  // namespace wide
