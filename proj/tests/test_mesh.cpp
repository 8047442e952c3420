#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "wide/assembly.hpp"

using namespace wide;

TEST_CASE("rectangular channel counts and tags") {
  const ChannelMesh m = build_rect_channel(16, 8, 2.0, 1.0);
  CHECK(m.node_count() == 17 * 9);
  CHECK(m.cell_count() == 128);
  CHECK(m.edges.size() == 2 * 16 + 2 * 8);
  CHECK(m.outlet_count == 1);
  CHECK(normal_closure(m).norm() < 1e-14);

  const std::vector<bool> fixed = m.fixed_dofs();
  int n_fixed = 0;
  for (bool f : fixed) n_fixed += f;
  // 9 inlet nodes (both components) plus 2 x 16 wall nodes (normal component)
  CHECK(n_fixed == 2 * 9 + 2 * 16);
}

TEST_CASE("two-outlet layout separates the outlets by a wall") {
  const ChannelMesh m = build_rect_channel(8, 6, 2.0, 1.0, OutletLayout::two_outlets);
  CHECK(m.outlet_count == 2);
  CHECK(m.outlet_edges(0).size() == 2);
  CHECK(m.outlet_edges(1).size() == 2);
  CHECK_THROWS_AS(build_rect_channel(8, 2, 2.0, 1.0, OutletLayout::two_outlets), std::invalid_argument);
}

TEST_CASE("flux row is the trapezoid rule") {
  const ChannelMesh m = build_rect_channel(6, 4, 3.0, 2.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m.dof_count());
  for (int n = 0; n < m.node_count(); ++n) v[2 * n] = 1.0 + m.nodes[n].y();
  // int_0^2 (1 + y) dy = 4, exact for linear data
  CHECK(m.flux_row(0).dot(v) == doctest::Approx(4.0));
  CHECK(boundary_flux(m, v, {BoundaryTag::outflow, 0}) == doctest::Approx(4.0));
  CHECK(boundary_flux(m, v, {BoundaryTag::dirichlet}) == doctest::Approx(-4.0));
}

TEST_CASE("parabolic inlet flux is the trapezoid value") {
  const ChannelMesh m = build_rect_channel(16, 8, 2.0, 1.0);
  const ExtensionField ext = build_extension_field(m, {InletProfile::Kind::parabolic, 1.0}, {});
  // 2/3 - h^2/12 * 8 with h = 1/8
  CHECK(ext.inlet_flux == doctest::Approx(0.65625).epsilon(1e-14));
  CHECK(ext.outlet_fluxes.size() == 1);
  CHECK(m.flux_row(0).dot(ext.velocity) == doctest::Approx(ext.inlet_flux).epsilon(1e-13));
}

TEST_CASE("extension field is discretely solenoidal and admissible") {
  for (auto layout : {OutletLayout::single, OutletLayout::two_outlets}) {
    const ChannelMesh m = build_rect_channel(12, 6, 2.0, 1.0, layout);
    const ExtensionField ext = build_extension_field(m, {InletProfile::Kind::parabolic, 1.5}, {});
    CHECK(cell_divergence(m, ext.velocity).cwiseAbs().maxCoeff() < 1e-12);
    const std::vector<bool> fixed = m.fixed_dofs();
    for (const auto& e : m.edges)
      if (e.tag == BoundaryTag::wall) CHECK(std::abs(ext.velocity.segment<2>(2 * e.a).dot(e.normal)) < 1e-14);
    for (int i = 0; i < m.outlet_count; ++i)
      CHECK(m.flux_row(i).dot(ext.velocity) == doctest::Approx(ext.outlet_fluxes[i]).epsilon(1e-12));
  }
}

TEST_CASE("uneven outlet fluxes are honoured") {
  const ChannelMesh m = build_rect_channel(12, 6, 2.0, 1.0, OutletLayout::two_outlets);
  const ExtensionField ext = build_extension_field(m, {InletProfile::Kind::uniform, 1.0}, {0.25, 0.75});
  CHECK(m.flux_row(0).dot(ext.velocity) == doctest::Approx(0.25));
  CHECK(m.flux_row(1).dot(ext.velocity) == doctest::Approx(0.75));
}

TEST_CASE("incompatible fluxes are rejected") {
  const ChannelMesh m = build_rect_channel(12, 6, 2.0, 1.0, OutletLayout::two_outlets);
  try {
    build_extension_field(m, {InletProfile::Kind::uniform, 1.0}, {0.5, 0.7});
    FAIL("expected a flux mismatch");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("net boundary flux mismatch") != std::string::npos);
  }
}

TEST_CASE("zero inlet gives the zero extension") {
  const ChannelMesh m = build_rect_channel(8, 4, 2.0, 1.0);
  const ExtensionField ext = build_extension_field(m, {InletProfile::Kind::zero, 1.0}, {});
  CHECK(ext.velocity.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("VTK writer emits quads, boundary lines and tags") {
  const ChannelMesh m = build_rect_channel(3, 2, 1.0, 1.0);
  std::ostringstream os;
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(m.dof_count());
  write_vtk(os, m, &v);
  const std::string s = os.str();
  CHECK(s.find("CELLS 16 60") != std::string::npos);
  CHECK(s.find("CELL_DATA 16") != std::string::npos);
  CHECK(s.find("VECTORS velocity double") != std::string::npos);
}
