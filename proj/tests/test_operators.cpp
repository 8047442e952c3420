#include <doctest.h>

#include "support.hpp"
#include "wide/assembly.hpp"

using namespace wide;

namespace {

Eigen::VectorXd nodal(const ChannelMesh& m, const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f) {
  Eigen::VectorXd v(m.dof_count());
  for (int n = 0; n < m.node_count(); ++n) v.segment<2>(2 * n) = f(m.nodes[n]);
  return v;
}

}  // namespace

TEST_CASE("matrices reproduce exact integrals of bilinear fields") {
  const ChannelMesh m = build_rect_channel(5, 3, 2.0, 1.5);
  const Eigen::VectorXd one = nodal(m, [](const Eigen::Vector2d&) { return Eigen::Vector2d(1.0, 1.0); });
  CHECK(one.dot(mass_matrix(m) * one) == doctest::Approx(2.0 * m.area()));
  CHECK((laplace_matrix(m) * one).norm() < 1e-12);
  // walls: bottom and top, total length 4
  CHECK(one.dot(wall_mass_matrix(m) * one) == doctest::Approx(2.0 * 4.0));

  const Eigen::VectorXd rot = nodal(m, [](const Eigen::Vector2d& x) { return Eigen::Vector2d(-x.y(), x.x()); });
  CHECK((strain_matrix(m) * rot).norm() < 1e-12);
  CHECK(rot.dot(laplace_matrix(m) * rot) == doctest::Approx(2.0 * m.area()));

  const Eigen::VectorXd lin = nodal(m, [](const Eigen::Vector2d& x) { return Eigen::Vector2d(3.0 * x.x(), -x.y()); });
  const Eigen::VectorXd d = divergence_matrix(m) * lin;
  CHECK(d.cwiseAbs().maxCoeff() == doctest::Approx(2.0 * m.cell_area()));
  CHECK(cell_divergence(m, lin).mean() == doctest::Approx(2.0));
}

TEST_CASE("pointwise quantities at Gauss points") {
  const ChannelMesh m = build_rect_channel(4, 2, 1.0, 1.0);
  const Eigen::VectorXd v = nodal(m, [](const Eigen::Vector2d& x) { return Eigen::Vector2d(x.y(), 0.0); });
  const auto cc = curl_cross(m, v);
  const auto pts = quadrature_points(m);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    // omega = -1, v = (y, 0): rot v x v = (0, -y)
    CHECK(cc[i].x() == doctest::Approx(0.0));
    CHECK(cc[i].y() == doctest::Approx(-pts[i].y()));
  }
  const auto sym = sym_gradient(m, v);
  CHECK(sym[0].xy == doctest::Approx(0.5));
  CHECK(divergence(m, v).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("exponential slab weights integrate e^{-t/eps} exactly") {
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(21, 0.0, 2.0);
  for (double eps : {0.05, 0.3, 1.0}) {
    const TimeQuadrature q = exp_weight_quadrature(eps, t);
    CHECK(q.weights.size() == 20);
    CHECK(q.weights.sum() == doctest::Approx(eps * (1.0 - std::exp(-2.0 / eps))).epsilon(1e-14));
    CHECK(q.midpoints[0] == doctest::Approx(0.05));
  }
}

TEST_CASE("trajectory interpolation and norms") {
  const ChannelMesh m = build_rect_channel(4, 2, 2.0, 1.0);
  const Eigen::VectorXd c = nodal(m, [](const Eigen::Vector2d&) { return Eigen::Vector2d(1.0, 2.0); });
  const Trajectory s = steady_trajectory(c, 3.0, 6);
  CHECK(s.slabs() == 6);
  CHECK(s.step() == doctest::Approx(0.5));
  // sqrt(T |Omega| |c|^2)
  CHECK(l2_norm(m, s, 3.0) == doctest::Approx(std::sqrt(3.0 * 2.0 * 5.0)));
  CHECK(l2_norm(m, s, 1.25) == doctest::Approx(std::sqrt(1.25 * 2.0 * 5.0)));

  Trajectory ramp = s;
  for (int k = 0; k < ramp.t.size(); ++k) ramp.v.col(k) = ramp.t[k] * c;
  CHECK((ramp.at(1.3) - 1.3 * c).norm() < 1e-13);
  // trapezoid in time of 10 (t-1)^2 on the half-step grid over [0,3]
  CHECK(l2_distance(m, ramp, s, 3.0) == doctest::Approx(std::sqrt(31.25)));
}

TEST_CASE("material derivative of a steady shear flow is the convective term") {
  const ChannelMesh m = build_rect_channel(4, 2, 1.0, 1.0);
  const Eigen::VectorXd v = nodal(m, [](const Eigen::Vector2d& x) { return Eigen::Vector2d(x.y(), 0.0); });
  const Trajectory s = steady_trajectory(v, 1.0, 2);
  const auto rot = wide_material_derivative(s, 0, m, Convection::rotational);
  const auto std_form = wide_material_derivative(s, 0, m, Convection::standard);
  const auto pts = quadrature_points(m);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(rot[i].y() == doctest::Approx(-pts[i].y()));
    // (v.grad)v = y d/dx (y, 0) = 0
    CHECK(std_form[i].norm() == doctest::Approx(0.0));
  }
}
