#include <cmath>
#include <random>
#include <stdexcept>

#include "wide/diagnostics.hpp"

namespace wide {

double EnergyReport::get(const std::string& name) const {
  for (const auto& [k, v] : entries)
    if (k == name) return v;
  throw std::out_of_range("no energy entry named " + name);
}

const std::vector<std::string>& energy_dissipation_names() {
  static const std::vector<std::string> names{"x2", "xr", "x4_eps", "xq_eps", "linf_l2"};
  return names;
}

const std::vector<std::string>& energy_rate_names() {
  static const std::vector<std::string> names{"dt_l2_eps", "curl_cross_l2_eps", "material_l2_eps"};
  return names;
}

namespace {

struct NodeSums {
  double grad2 = 0, gradr = 0, grad4 = 0, gradq = 0;  // int |grad v|^p
  double v2 = 0, vr = 0, v4 = 0, vq = 0;              // int |v|^p
  double cc2 = 0, ccr = 0, ccq = 0;                   // int |rot v x v|^p, p in {2, r/2, q/2}
};

NodeSums node_sums(const ChannelMesh& mesh, const CellBasis& b, const Eigen::VectorXd& v, double r, double q) {
  NodeSums s;
  for (const auto& cell : mesh.cells)
    for (int k = 0; k < 4; ++k) {
      const PointState ps = point_state(b, cell, v, k);
      const double g = ps.grad.norm(), a = ps.v.norm();
      const double c = curl_cross_point(ps.omega(), ps.v).norm();
      const double w = b.weight;
      s.grad2 += w * g * g;
      s.gradr += w * std::pow(g, r);
      s.grad4 += w * std::pow(g, 4.0);
      s.gradq += w * std::pow(g, q);
      s.v2 += w * a * a;
      s.vr += w * std::pow(a, r);
      s.v4 += w * std::pow(a, 4.0);
      s.vq += w * std::pow(a, q);
      s.cc2 += w * c * c;
      s.ccr += w * std::pow(c, 0.5 * r);
      s.ccq += w * std::pow(c, 0.5 * q);
    }
  return s;
}

}  // namespace

EnergyReport energy_report(const Trajectory& traj, const ChannelMesh& mesh, const ConstitutiveParams& params,
                           double t_end) {
  const double r = params.r, q = params.q, eps = params.eps;
  const CellBasis b = make_cell_basis(mesh);
  NodeSums acc;
  double linf = 0.0, dt2 = 0.0, mat2 = 0.0;
  bool have_prev = false;
  NodeSums prev;
  for (int k = 0; k < static_cast<int>(traj.t.size()); ++k) {
    if (traj.t[k] > t_end + 1e-12) break;
    const NodeSums cur = node_sums(mesh, b, traj.v.col(k), r, q);
    linf = std::max(linf, std::sqrt(cur.v2));
    if (have_prev) {
      const double h = traj.t[k] - traj.t[k - 1];
      auto trap = [&](double NodeSums::*m) { acc.*m += 0.5 * h * (prev.*m + cur.*m); };
      for (auto m : {&NodeSums::grad2, &NodeSums::gradr, &NodeSums::grad4, &NodeSums::gradq, &NodeSums::v2,
                     &NodeSums::vr, &NodeSums::v4, &NodeSums::vq, &NodeSums::cc2, &NodeSums::ccr, &NodeSums::ccq})
        trap(m);
      Trajectory slab;
      slab.t = traj.t.segment(k - 1, 2);
      slab.v = traj.v.middleCols(k - 1, 2);
      const Eigen::VectorXd rate = (traj.v.col(k) - traj.v.col(k - 1)) / h;
      const std::vector<Eigen::Vector2d> md = wide_material_derivative(slab, 0, mesh);
      for (int c = 0; c < mesh.cell_count(); ++c)
        for (int g = 0; g < 4; ++g) {
          Eigen::Vector2d dv = Eigen::Vector2d::Zero();
          for (int a = 0; a < 4; ++a) dv += b.n[g][a] * rate.segment<2>(2 * mesh.cells[c][a]);
          dt2 += h * b.weight * dv.squaredNorm();
          mat2 += h * b.weight * md[4 * c + g].squaredNorm();
        }
    }
    prev = cur;
    have_prev = true;
  }
  EnergyReport rep;
  rep.eps = eps;
  rep.entries = {
      {"x2", std::sqrt(acc.grad2 + acc.v2)},
      {"xr", std::pow(acc.gradr + acc.vr, 1.0 / r)},
      {"x4_eps", std::pow(eps, 0.25) * std::pow(acc.grad4 + acc.v4, 0.25)},
      {"xq_eps", std::pow(eps, 1.0 / q) * std::pow(acc.gradq + acc.vq, 1.0 / q)},
      {"linf_l2", linf},
      {"dt_l2_eps", std::sqrt(eps * dt2)},
      {"curl_cross_l2_eps", std::sqrt(eps * acc.cc2)},
      {"material_l2_eps", std::sqrt(eps * mat2)},
      {"curl_cross_r2", std::pow(acc.ccr, 2.0 / r)},
      {"curl_cross_q2_eps", std::pow(eps, 2.0 / q) * std::pow(acc.ccq, 2.0 / q)},
  };
  return rep;
}

namespace {

struct KornParts {
  double num = 0.0;
  double den = 0.0;
  Eigen::VectorXd dnum;
  Eigen::VectorXd dden;
};

// Numerator and denominator of the Korn ratio with gradients in w.
KornParts korn_parts(const ChannelMesh& mesh, const Eigen::VectorXd& w, double p, bool grad) {
  const CellBasis b = make_cell_basis(mesh);
  KornParts k;
  if (grad) {
    k.dnum = Eigen::VectorXd::Zero(w.size());
    k.dden = Eigen::VectorXd::Zero(w.size());
  }
  // d/dx |x|^p = p |x|^{p-2} x
  auto dpow = [p](double n) { return n > 0.0 ? p * std::pow(n, p - 2.0) : 0.0; };
  for (const auto& cell : mesh.cells)
    for (int q = 0; q < 4; ++q) {
      const PointState s = point_state(b, cell, w, q);
      const Eigen::Matrix2d g = s.grad;
      const Eigen::Matrix2d d = 0.5 * (g + g.transpose());
      const double gn = g.norm(), dn = d.norm(), vn = s.v.norm();
      k.num += b.weight * (std::pow(gn, p) + std::pow(vn, p));
      k.den += b.weight * std::pow(dn, p);
      if (!grad) continue;
      const Eigen::Matrix2d gg = b.weight * dpow(gn) * g, dd = b.weight * dpow(dn) * d;
      const Eigen::Vector2d vv = b.weight * dpow(vn) * s.v;
      for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 2; ++c) {
          const int dof = 2 * cell[a] + c;
          const double nx = b.dndx[q][a], ny = b.dndy[q][a], n = b.n[q][a];
          k.dnum[dof] += gg(c, 0) * nx + gg(c, 1) * ny + vv[c] * n;
          k.dden[dof] += dd(c, 0) * nx + dd(c, 1) * ny;
        }
    }
  for (const auto& e : mesh.edges) {
    if (e.tag != BoundaryTag::wall) continue;
    for (double s : kEdgePoints) {
      const Eigen::Vector2d wq = (1.0 - s) * w.segment<2>(2 * e.a) + s * w.segment<2>(2 * e.b);
      const double wt = 0.5 * e.length;
      k.den += wt * std::pow(wq.norm(), p);
      if (!grad) continue;
      const Eigen::Vector2d g = wt * dpow(wq.norm()) * wq;
      k.dden.segment<2>(2 * e.a) += (1.0 - s) * g;
      k.dden.segment<2>(2 * e.b) += s * g;
    }
  }
  return k;
}

}  // namespace

double korn_ratio(const ChannelMesh& mesh, const Eigen::VectorXd& w, double p) {
  const KornParts k = korn_parts(mesh, w, p, false);
  if (!(k.den > 0.0)) throw std::invalid_argument("Korn ratio undefined for this field");
  return k.num / k.den;
}

KornEstimate estimate_korn_constant(const ChannelMesh& mesh, double p, unsigned seed, int starts, int iterations) {
  if (!(p > 1.0)) throw std::invalid_argument("Korn exponent must exceed 1");
  const std::vector<bool> fixed = mesh.fixed_dofs();
  bool anchored = false;
  for (const auto& e : mesh.edges) anchored = anchored || e.tag != BoundaryTag::outflow;
  if (!anchored) throw std::invalid_argument("Korn estimate needs Dirichlet or wall boundary");
  std::vector<Eigen::VectorXd> rows;
  for (int i = 0; i < mesh.outlet_count; ++i) {
    Eigen::VectorXd c = mesh.flux_row(i);
    for (int d = 0; d < c.size(); ++d)
      if (fixed[d]) c[d] = 0.0;
    rows.push_back(c);
  }
  auto project = [&](Eigen::VectorXd& w) {
    for (int d = 0; d < w.size(); ++d)
      if (fixed[d]) w[d] = 0.0;
    for (const auto& c : rows) w -= c * (c.dot(w) / c.squaredNorm());
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  KornEstimate best;
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd w(mesh.dof_count());
    for (auto& x : w) x = normal(rng);
    project(w);
    w /= w.norm();
    double step = 1.0;
    KornParts k = korn_parts(mesh, w, p, true);
    double ratio = k.num / k.den;
    for (int it = 0; it < iterations && step > 1e-14; ++it) {
      // Gradient of num/den; homogeneity of degree 0 makes it orthogonal to w.
      Eigen::VectorXd g = (k.dnum - ratio * k.dden) / k.den;
      project(g);
      const double gn = g.norm();
      if (gn < 1e-14 * std::max(1.0, ratio)) break;
      Eigen::VectorXd trial = w + step * g / gn;
      trial /= trial.norm();
      KornParts kt = korn_parts(mesh, trial, p, true);
      const double rt = kt.num / kt.den;
      if (rt > ratio) {
        w = std::move(trial);
        k = std::move(kt);
        ratio = rt;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    if (ratio > best.ratio) {
      best.ratio = ratio;
      best.field = w;
    }
  }
  return best;
}

}  // namespace wide
