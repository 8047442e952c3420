// Oracles and generators shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "wide/config.hpp"
#include "wide/constitutive.hpp"
#include "wide/functional.hpp"
#include "wide/operators.hpp"
#include "wide/scenario.hpp"

namespace wide::test {

/// Gauss-Legendre nodes and weights on [0,1] by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

inline SymTensor2<double> random_sym(std::mt19937_64& rng, double max_norm) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), len(0.0, 1.0);
  SymTensor2<double> a{u(rng), u(rng), u(rng)};
  const double n = std::sqrt(norm2(a));
  return n > 0.0 ? (max_norm * len(rng) / n) * a : a;
}

inline ConstitutiveParams scenario_params(double r = 2.5, double eps = 0.1) {
  ConstitutiveParams p;
  p.r = r;
  p.eps = eps;
  return p;
}

/// Config of the ladder scenario: 16x8 channel, parabolic inlet, one outlet.
inline RunConfig ladder_config() {
  RunConfig c;
  c.solver.ladder = {0.4, 0.2, 0.1, 0.05};
  c.solver.reference = true;
  return c;
}

inline FlowProblem small_problem(int nx, int ny, double eps = 0.2, InletProfile::Kind inlet = InletProfile::Kind::parabolic) {
  RunConfig c;
  c.geometry.nx = nx;
  c.geometry.ny = ny;
  c.data.inlet = inlet;
  c.solver.ladder = {eps};
  return make_problem(c);
}


/// Smooth manufactured flow on [0,L]x[0,1] that vanishes with its gradient on
/// the whole boundary: v = A sin(t) curl(g(x) h(y)), g = x^2 (L-x)^3,
/// h = y^3 (1-y)^3, and P = int_0^t p = sin(t) x y (L-x).
struct Manufactured {
  double length = 2.0;
  double amp = 10.0;
  ConstitutiveParams params;

  double g(double x) const { return x * x * std::pow(length - x, 3); }
  double g1(double x) const { const double l = length - x; return 2 * x * l * l * l - 3 * x * x * l * l; }
  double g2(double x) const { const double l = length - x; return 2 * l * l * l - 12 * x * l * l + 6 * x * x * l; }
  double h(double y) const { return std::pow(y * (1 - y), 3); }
  double h1(double y) const { return 3 * y * y * std::pow(1 - y, 3) - 3 * y * y * y * (1 - y) * (1 - y); }
  double h2(double y) const {
    return 6 * y * std::pow(1 - y, 3) - 18 * y * y * (1 - y) * (1 - y) + 6 * y * y * y * (1 - y);
  }

  Eigen::Vector2d v(double t, const Eigen::Vector2d& p) const {
    const double s = amp * std::sin(t);
    return {s * g(p.x()) * h1(p.y()), -s * g1(p.x()) * h(p.y())};
  }
  Eigen::Matrix2d grad(double t, const Eigen::Vector2d& p) const {
    const double s = amp * std::sin(t), x = p.x(), y = p.y();
    Eigen::Matrix2d m;
    m << s * g1(x) * h1(y), s * g(x) * h2(y), -s * g2(x) * h(y), -s * g1(x) * h1(y);
    return m;
  }
  double pressure(double t, const Eigen::Vector2d& p) const { return std::cos(t) * p.x() * p.y() * (length - p.x()); }
  /// int_0^t p
  double integrated_pressure(double t, const Eigen::Vector2d& p) const {
    return std::sin(t) * p.x() * p.y() * (length - p.x());
  }
  Eigen::Vector2d pressure_gradient(double t, const Eigen::Vector2d& p) const {
    return std::cos(t) * Eigen::Vector2d(p.y() * (length - 2 * p.x()), p.x() * (length - p.x()));
  }
  Eigen::Matrix2d stress(double t, const Eigen::Vector2d& p) const {
    return stress_bulk(SymTensor2<double>::from_matrix(grad(t, p)), params, false).matrix();
  }
  /// dv/dt + (grad v) v - div S(Dv) + grad p; div S by central differences.
  Eigen::Vector2d forcing(double t, const Eigen::Vector2d& p) const {
    const double d = 1e-5;
    const Eigen::Vector2d ex(d, 0), ey(0, d);
    const Eigen::Matrix2d sx = (stress(t, p + ex) - stress(t, p - ex)) / (2 * d);
    const Eigen::Matrix2d sy = (stress(t, p + ey) - stress(t, p - ey)) / (2 * d);
    const Eigen::Vector2d div_s(sx(0, 0) + sy(0, 1), sx(1, 0) + sy(1, 1));
    const double c = amp * std::cos(t);
    const Eigen::Vector2d dv(c * g(p.x()) * h1(p.y()), -c * g1(p.x()) * h(p.y()));
    return dv + grad(t, p) * v(t, p) - div_s + pressure_gradient(t, p);
  }

  FlowProblem problem(int nx, int ny) const {
    RunConfig c;
    c.geometry.nx = nx;
    c.geometry.ny = ny;
    c.geometry.length = length;
    c.data.inlet = InletProfile::Kind::zero;
    c.physics.params = params;
    c.solver.ladder = {params.eps};
    FlowProblem fp = make_problem(c);
    fp.forcing = [m = *this](double t, const Eigen::Vector2d& x) { return m.forcing(t, x); };
    return fp;
  }

  Trajectory trajectory(const ChannelMesh& mesh, double t_end, int slabs) const {
    Trajectory tr;
    tr.t = Eigen::VectorXd::LinSpaced(slabs + 1, 0.0, t_end);
    tr.v.resize(mesh.dof_count(), slabs + 1);
    for (int k = 0; k <= slabs; ++k)
      for (int n = 0; n < mesh.node_count(); ++n) tr.v.col(k).segment<2>(2 * n) = v(tr.t[k], mesh.nodes[n]);
    return tr;
  }
};

}  // namespace wide::test
