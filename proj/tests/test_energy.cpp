#include <doctest.h>

#include <map>

#include "support.hpp"
#include "wide/diagnostics.hpp"

using namespace wide;

TEST_CASE("energy report of the zero trajectory is zero") {
  const FlowProblem p = test::small_problem(6, 3, 0.1, InletProfile::Kind::zero);
  const Trajectory tr = steady_trajectory(p.extension.velocity, 1.0, 8);
  const EnergyReport rep = energy_report(tr, p.mesh, p.params, 1.0);
  CHECK(rep.entries.size() == 10);
  for (const auto& [name, value] : rep.entries) CHECK(value == 0.0);
  for (const auto& n : energy_dissipation_names()) CHECK_NOTHROW(rep.get(n));
  for (const auto& n : energy_rate_names()) CHECK_NOTHROW(rep.get(n));
}

TEST_CASE("eps-weighted entries carry the documented powers of eps") {
  const test::Manufactured ms;
  const FlowProblem p = ms.problem(8, 4);
  const Trajectory tr = ms.trajectory(p.mesh, 1.0, 20);
  ConstitutiveParams a = p.params, b = p.params;
  a.eps = 0.2;
  b.eps = 0.1;
  const EnergyReport ra = energy_report(tr, p.mesh, a, 1.0), rb = energy_report(tr, p.mesh, b, 1.0);
  const double q = a.q;
  const std::map<std::string, double> factor{
      {"x2", 1.0},
      {"xr", 1.0},
      {"x4_eps", std::pow(0.5, 0.25)},
      {"xq_eps", std::pow(0.5, 1.0 / q)},
      {"linf_l2", 1.0},
      {"dt_l2_eps", std::sqrt(0.5)},
      {"curl_cross_l2_eps", std::sqrt(0.5)},
      {"material_l2_eps", std::sqrt(0.5)},
      {"curl_cross_r2", 1.0},
      {"curl_cross_q2_eps", std::pow(0.5, 2.0 / q)},
  };
  for (const auto& [name, f] : factor) {
    CAPTURE(name);
    REQUIRE(ra.get(name) > 0.0);
    CHECK(rb.get(name) == doctest::Approx(f * ra.get(name)).epsilon(1e-13));
  }
  CHECK_THROWS(ra.get("missing"));
}

TEST_CASE("time window truncates the integrals") {
  const FlowProblem p = test::small_problem(6, 3, 0.1);
  const Trajectory tr = steady_trajectory(p.extension.velocity, 2.0, 8);
  const EnergyReport one = energy_report(tr, p.mesh, p.params, 1.0), two = energy_report(tr, p.mesh, p.params, 2.0);
  CHECK(two.get("x2") == doctest::Approx(std::sqrt(2.0) * one.get("x2")));
  CHECK(two.get("linf_l2") == one.get("linf_l2"));
  CHECK(one.get("dt_l2_eps") == 0.0);
}

TEST_CASE("Korn ratio of a linear stretch on the unit square") {
  const ChannelMesh m = build_rect_channel(4, 4, 1.0, 1.0);
  Eigen::VectorXd w(m.dof_count());
  for (int n = 0; n < m.node_count(); ++n) w.segment<2>(2 * n) = Eigen::Vector2d(m.nodes[n].x(), 0.0);
  // (1 + 1/3) / (1 + 2/3)
  CHECK(korn_ratio(m, w, 2.0) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(korn_ratio(m, 3.0 * w, 2.0) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK_THROWS_AS(korn_ratio(m, Eigen::VectorXd::Zero(m.dof_count()), 2.0), std::invalid_argument);
}

TEST_CASE("Korn estimate returns an admissible maximizer") {
  const ChannelMesh m = build_rect_channel(8, 4, 2.0, 1.0);
  const KornEstimate k = estimate_korn_constant(m, 2.5, 7, 4, 200);
  REQUIRE(std::isfinite(k.ratio));
  CHECK(k.ratio > 0.0);
  CHECK(korn_ratio(m, k.field, 2.5) == doctest::Approx(k.ratio).epsilon(1e-12));
  const std::vector<bool> fixed = m.fixed_dofs();
  for (int d = 0; d < m.dof_count(); ++d)
    if (fixed[d]) CHECK(k.field[d] == 0.0);
  CHECK(std::abs(m.flux_row(0).dot(k.field)) < 1e-12);
  CHECK(estimate_korn_constant(m, 2.5, 7, 8, 200).ratio >= k.ratio);
  CHECK_THROWS_AS(estimate_korn_constant(m, 1.0), std::invalid_argument);
}
