// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "support.hpp"
#include "wide/diagnostics.hpp"
#include "wide/minimizer.hpp"
#include "wide/reference.hpp"
#include "wide/scenario.hpp"

using namespace wide;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Row lookup in scenario diagnostics.
double row(const std::vector<DiagnosticRow>& rows, double eps, const std::string& name) {
  for (const auto& r : rows)
    if (r.eps == eps && r.quantity == name) return r.value;
  throw std::out_of_range("missing diagnostic " + name);
}

const ScenarioResult& ladder_run() {
  static std::optional<ScenarioResult> res;
  if (!res) {
    res = run_scenario(test::ladder_config(), nullptr, false);
    if (res->exit_code != 0) throw std::runtime_error("ladder scenario failed: " + res->message);
  }
  return *res;
}

Outcome criterion1() {
  std::mt19937_64 rng(1);
  const auto [xs, ws] = test::gauss_legendre01(64);
  double worst_pot = 0.0, worst_grad = 0.0;
  for (double r : {2.0, 2.5, 3.0})
    for (int i = 0; i < 1000; ++i) {
      ConstitutiveParams p = test::scenario_params(r, 0.1);
      const SymTensor2<double> a = test::random_sym(rng, 10.0);
      for (bool stab : {false, true}) {
        double quad = 0.0;
        for (int k = 0; k < 64; ++k) quad += ws[k] * contract(stress_bulk(xs[k] * a, p, stab), a);
        const double closed = potential_bulk(a, p, stab);
        if (closed != 0.0) worst_pot = std::max(worst_pot, std::abs(quad - closed) / std::abs(closed));

        // d/dxx, d/dxy (both off-diagonal entries) and d/dyy
        const SymTensor2<double> s = stress_bulk(a, p, stab);
        const Eigen::Vector3d exact(s.xx, 2.0 * s.xy, s.yy);
        Eigen::Vector3d fd;
        const double d = 1e-6 * std::max(1.0, std::sqrt(norm2(a)));
        for (int c = 0; c < 3; ++c) {
          SymTensor2<double> e{};
          (c == 0 ? e.xx : c == 1 ? e.xy : e.yy) = d;
          fd[c] = (potential_bulk(a + e, p, stab) - potential_bulk(a - e, p, stab)) / (2 * d);
        }
        if (exact.norm() > 0.0) worst_grad = std::max(worst_grad, (fd - exact).norm() / exact.norm());
      }
    }
  return {worst_pot <= 1e-10 && worst_grad <= 1e-6,
          "potential rel err " + fmt(worst_pot) + ", gradient rel err " + fmt(worst_grad)};
}

Outcome criterion2() {
  using L = long double;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0), epsd(1e-3, 1.0);
  const double rs[] = {2.0, 2.5, 3.0};
  L worst = 1e300L;
  for (int i = 0; i < 10000; ++i) {
    ConstitutiveParams p = test::scenario_params(rs[i % 3], epsd(rng));
    const SymTensor2<double> ad = test::random_sym(rng, 10.0), bd = test::random_sym(rng, 10.0);
    const SymTensor2<L> a{ad.xx, ad.xy, ad.yy}, b{bd.xx, bd.xy, bd.yy};
    worst = std::min(worst, contract(stress_bulk(a, p, true) - stress_bulk(b, p, true), a - b));
    const L na = std::sqrt(norm2(a));
    const L low = p.sigma2 * na * na + p.sigma_r * std::pow(na, (L)p.r) + p.eps * p.sigma4 * std::pow(na, 4.0L) +
                  p.eps * p.sigma_q * std::pow(na, (L)p.q);
    worst = std::min(worst, contract(stress_bulk(a, p, true), a) - low);
    Eigen::Matrix<L, 2, 1> w(10.0L * u(rng), 10.0L * u(rng));
    if (w.norm() > 10.0L) w *= 10.0L / w.norm();
    const L nw = w.norm();
    const L wlow = p.rho2 * nw * nw + p.rho_r * std::pow(nw, (L)p.r) + p.eps * p.rho4 * std::pow(nw, 4.0L) +
                   p.eps * p.rho_q * std::pow(nw, (L)p.q);
    worst = std::min(worst, stress_boundary(w, p, true).dot(w) - wlow);
  }
  return {worst >= -1e-12L, "minimum slack " + fmt(static_cast<double>(worst))};
}

Outcome criterion3() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_orth = 0.0, worst_ab = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::Vector2d v(u(rng), u(rng)), a(u(rng), u(rng));
    const double omega = u(rng);
    const Eigen::Vector2d b = curl_cross_point(omega, v);
    worst_orth = std::max(worst_orth, std::abs(b.dot(v)));
    worst_ab = std::max(worst_ab, std::abs((a + b).dot(a + 2 * b) - ((a + 1.5 * b).squaredNorm() - 0.25 * b.squaredNorm())));
  }
  // discrete random fields at Gauss points
  const ChannelMesh mesh = build_rect_channel(8, 4, 2.0, 1.0);
  const CellBasis basis = make_cell_basis(mesh);
  for (int s = 0; s < 10; ++s) {
    Eigen::VectorXd f(mesh.dof_count());
    for (auto& x : f) x = u(rng);
    for (const auto& cell : mesh.cells)
      for (int q = 0; q < 4; ++q) {
        const PointState ps = point_state(basis, cell, f, q);
        worst_orth = std::max(worst_orth, std::abs(curl_cross_point(ps.omega(), ps.v).dot(ps.v)));
      }
  }

  // (v.grad)v - grad(|v|^2/2) against rot v x v of the interpolant
  auto exact_v = [](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(std::sin(x.x()) * std::cos(x.y()) + x.y() * x.y(), std::exp(0.5 * x.x()) * std::sin(2 * x.y()));
  };
  auto exact_grad = [](const Eigen::Vector2d& x) {
    Eigen::Matrix2d g;
    g << std::cos(x.x()) * std::cos(x.y()), -std::sin(x.x()) * std::sin(x.y()) + 2 * x.y(),
        0.5 * std::exp(0.5 * x.x()) * std::sin(2 * x.y()), 2 * std::exp(0.5 * x.x()) * std::cos(2 * x.y());
    return g;
  };
  double err[2];
  for (int level = 0; level < 2; ++level) {
    const ChannelMesh m = build_rect_channel(8 << level, 4 << level, 2.0, 1.0);
    Eigen::VectorXd f(m.dof_count());
    for (int n = 0; n < m.node_count(); ++n) f.segment<2>(2 * n) = exact_v(m.nodes[n]);
    const auto cc = curl_cross(m, f);
    const auto pts = quadrature_points(m);
    const double w = make_cell_basis(m).weight;
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Eigen::Vector2d v = exact_v(pts[i]);
      const Eigen::Matrix2d g = exact_grad(pts[i]);
      const Eigen::Vector2d lamb = g * v - g.transpose() * v;  // (v.grad)v - grad |v|^2/2
      acc += w * (cc[i] - lamb).squaredNorm();
    }
    err[level] = std::sqrt(acc);
  }
  const double rate = std::log2(err[0] / err[1]);
  return {worst_orth <= 1e-14 && worst_ab <= 1e-14 && rate >= 0.8,
          "orthogonality " + fmt(worst_orth) + ", (a+b) identity " + fmt(worst_ab) + ", convection rate " + fmt(rate)};
}

Outcome criterion4() {
  const ScenarioResult& res = ladder_run();
  std::vector<double> dist, rel;
  for (const auto& rung : res.continuation.rungs) {
    dist.push_back(row(res.diagnostics, rung.eps, "distance_to_reference"));
    rel.push_back(row(res.diagnostics, rung.eps, "relative_distance_to_reference"));
  }
  int up = 0;
  bool small_up = true;
  for (std::size_t i = 1; i < dist.size(); ++i)
    if (dist[i] > dist[i - 1]) {
      ++up;
      small_up = small_up && dist[i] <= 1.1 * dist[i - 1];
    }
  std::string d;
  for (double x : dist) d += (d.empty() ? "" : ", ") + fmt(x);
  return {up <= 1 && small_up && rel.back() <= 0.1,
          "distances " + d + ", final relative " + fmt(rel.back())};
}

Outcome criterion5() {
  const ScenarioResult& res = ladder_run();
  double worst1 = 0.0, worst2 = 0.0;
  for (const auto& name : energy_dissipation_names()) {
    std::vector<double> v;
    for (const auto& rung : res.continuation.rungs) v.push_back(row(res.diagnostics, rung.eps, "energy_" + name));
    const double med = median(v);
    const double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
    worst1 = std::max({worst1, hi / med, med / lo});
  }
  for (const auto& name : energy_rate_names()) {
    std::vector<double> v;
    for (const auto& rung : res.continuation.rungs) v.push_back(row(res.diagnostics, rung.eps, "energy_" + name));
    worst2 = std::max(worst2, *std::max_element(v.begin(), v.end()) / median(v));
  }
  return {worst1 <= 2.0 && worst2 <= 2.0,
          "dissipation spread " + fmt(worst1) + "x median, eps-weighted max " + fmt(worst2) + "x median"};
}

Outcome criterion6() {
  const ScenarioResult& res = ladder_run();
  double flux = 0.0;
  for (const auto& r : res.diagnostics)
    if (r.quantity == "flux_residual") flux = std::max(flux, r.value);
  RunConfig stiff = test::ladder_config();
  stiff.solver.kappa *= 10.0;
  stiff.solver.reference = false;
  const ScenarioResult res2 = run_scenario(stiff, nullptr, false);
  if (res2.exit_code != 0) return {false, "stiff run failed: " + res2.message};
  double ratio = 1e300;
  for (const auto& rung : res.continuation.rungs) {
    const double a = row(res.diagnostics, rung.eps, "divergence_norm");
    const double b = row(res2.diagnostics, rung.eps, "divergence_norm");
    ratio = std::min(ratio, a / b);
    for (const auto& r : res2.diagnostics)
      if (r.quantity == "flux_residual") flux = std::max(flux, r.value);
  }
  return {flux <= 1e-12 && ratio >= 3.0,
          "max flux residual " + fmt(flux) + ", divergence reduction " + fmt(ratio) + "x for 10x kappa"};
}

Outcome criterion7() {
  const FlowProblem problem = test::small_problem(8, 4, 0.2);
  const ConstraintHandler h = make_constraint_handler(problem, 1e4);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  const int nodes = 9;
  double worst = 0.0;
  for (int s = 0; s < 3; ++s) {
    Trajectory tr;
    tr.t = Eigen::VectorXd::LinSpaced(nodes, 0.0, 1.0);
    tr.v = problem.extension.velocity.replicate(1, nodes);
    for (int k = 1; k < nodes; ++k)
      for (int i = 0; i < tr.v.rows(); ++i) tr.v(i, k) += 0.3 * normal(rng);
    tr.v = project_admissible(tr.v, h);
    const FunctionalEval ev = evaluate_with_gradient(tr, problem, h);
    const Eigen::MatrixXd d = random_direction(h, nodes, rng, false);
    const double exact = (ev.gradient.array() * d.array()).sum();
    auto diff = [&](double step) {
      Trajectory p = tr, m = tr;
      p.v += step * d;
      m.v -= step * d;
      return (evaluate(p, problem, h).value - evaluate(m, problem, h).value) / (2 * step);
    };
    const double step = 1e-4 / d.norm();
    const double fd = (4.0 * diff(0.5 * step) - diff(step)) / 3.0;
    worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
  }

  MinimizerOptions mo;
  mo.grad_tol = 1e-6;
  Trajectory start;
  start.t = Eigen::VectorXd::LinSpaced(nodes, 0.0, 1.0);
  start.v = problem.extension.velocity.replicate(1, nodes);
  const MinimizerResult mr = minimize(start, problem, h, mo);
  std::vector<Eigen::MatrixXd> tests;
  for (int k = 0; k < 3; ++k) tests.push_back(random_direction(h, nodes, rng, true));
  const El2Residual el2 = el2_residual(mr.trajectory, problem, h, tests);
  double el2_ratio = 0.0;
  for (int k = 0; k < el2.residual.size(); ++k)
    el2_ratio = std::max(el2_ratio, std::abs(el2.residual[k]) / (mo.grad_tol * el2.test_norm[k]));
  return {worst <= 1e-6 && mr.status == MinimizerStatus::converged && el2_ratio <= 10.0,
          "gradient rel err " + fmt(worst) + ", EL2 residual " + fmt(el2_ratio) + " x grad_tol x test norm"};
}

// Steady reference flow on an nx-by-ny channel as a constant trajectory on [0, 1].
struct SteadyCase {
  FlowProblem problem;
  Trajectory traj;
};

SteadyCase steady_case(int nx, int ny) {
  RunConfig c;
  c.geometry.nx = nx;
  c.geometry.ny = ny;
  c.solver.ladder = {0.05};
  SteadyCase s{make_problem(c), {}};
  const ReferenceSolver solver(s.problem, ReferenceOptions{});
  s.traj = steady_trajectory(solver.solve_steady(), 1.0, 40);
  return s;
}

std::vector<std::vector<Eigen::VectorXd>> default_eta(const ChannelMesh& mesh) {
  std::vector<std::vector<Eigen::VectorXd>> eta(mesh.outlet_count);
  for (int i = 0; i < mesh.outlet_count; ++i)
    for (int kind = 0; kind < 3; ++kind) eta[i].push_back(outlet_multiplier(mesh, i, kind));
  return eta;
}

Outcome criterion8() {
  test::Manufactured ms;
  const double t_end = 0.5;
  double err[2];
  for (int level = 0; level < 2; ++level) {
    const int nx = 8 << level, ny = 4 << level;
    const FlowProblem problem = ms.problem(nx, ny);
    const Trajectory tr = ms.trajectory(problem.mesh, t_end, 100);
    const PressureField pf = reconstruct_pressure(tr, problem, Eigen::VectorXd());
    const ChannelMesh& mesh = problem.mesh;
    const CellBasis b = make_cell_basis(mesh);
    const auto pts = quadrature_points(mesh);
    Eigen::VectorXd exact(mesh.cell_count());
    for (int c = 0; c < mesh.cell_count(); ++c) {
      double acc = 0.0;
      for (int q = 0; q < 4; ++q) acc += 0.25 * ms.integrated_pressure(t_end, pts[4 * c + q]);
      exact[c] = acc;
    }
    exact.array() -= exact.mean();
    err[level] = std::sqrt(b.area * (pf.p.col(pf.p.cols() - 1) - exact).squaredNorm());
  }
  const double rate = std::log2(err[0] / err[1]);

  SteadyCase sc = steady_case(16, 8);
  const Eigen::VectorXd d = (0.3 + 0.1 * sc.traj.t.array()).matrix();
  const PressureField p1 = reconstruct_pressure(sc.traj, sc.problem, d);
  const PressureField p2 = reconstruct_pressure(sc.traj, sc.problem, (d.array() + 5.0).matrix());
  const double defect = std::max(p1.mean_defect(sc.problem.mesh), p2.mean_defect(sc.problem.mesh));
  const auto psi = default_time_bumps(1.0);
  const auto eta = default_eta(sc.problem.mesh);
  const BoundaryReport b1 = boundary_report(sc.traj, sc.problem, p1, psi, eta);
  const BoundaryReport b2 = boundary_report(sc.traj, sc.problem, p2, psi, eta);
  double shift = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    shift = std::max(shift, std::abs(b1.wall_residual[j] - b2.wall_residual[j]) / std::max(1e-300, b1.wall_residual[j]));
    shift = std::max(shift, std::abs(b1.outlet_residual[j] - b2.outlet_residual[j]) / std::max(1e-300, b1.outlet_residual[j]));
  }
  return {rate >= 0.8 && defect <= 1e-10 && shift <= 1e-12,
          "pressure errors " + fmt(err[0]) + " -> " + fmt(err[1]) + " (rate " + fmt(rate) + "), mean defect " +
              fmt(defect) + ", shift change " + fmt(shift)};
}

Outcome criterion9() {
  double wall[2], outlet[2], spread = 0.0;
  for (int level = 0; level < 2; ++level) {
    SteadyCase sc = steady_case(16 << level, 8 << level);
    const PressureField pf = reconstruct_pressure(sc.traj, sc.problem, Eigen::VectorXd());
    const BoundaryReport br = boundary_report(sc.traj, sc.problem, pf, default_time_bumps(1.0), default_eta(sc.problem.mesh));
    wall[level] = *std::max_element(br.wall_residual.begin(), br.wall_residual.end());
    outlet[level] = *std::max_element(br.outlet_residual.begin(), br.outlet_residual.end());
    if (level == 0)
      for (const auto& per_psi : br.c)
        for (const auto& cs : per_psi) {
          const auto [lo, hi] = std::minmax_element(cs.begin(), cs.end());
          double mean = 0.0;
          for (double c : cs) mean += c / cs.size();
          spread = std::max(spread, (*hi - *lo) / std::abs(mean));
        }
  }
  const double fw = wall[0] / wall[1], fo = outlet[0] / outlet[1];
  return {fw >= 1.5 && fo >= 1.5 && spread <= 0.01,
          "wall residual " + fmt(wall[0]) + " -> " + fmt(wall[1]) + " (" + fmt(fw) + "x), outlet residual " +
              fmt(outlet[0]) + " -> " + fmt(outlet[1]) + " (" + fmt(fo) + "x), c spread across eta " + fmt(spread)};
}

Outcome criterion10() {
  const ScenarioResult& res = ladder_run();
  double worst = -1e300;
  for (const auto& e : res.reference.ledger) worst = std::max(worst, e.relative_violation());
  return {!res.reference.ledger.empty() && worst <= 1e-10,
          std::to_string(res.reference.ledger.size()) + " steps, max relative violation " + fmt(worst)};
}

}  // namespace

int main(int argc, char** argv) {
  Outcome (*criteria[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                             criterion6, criterion7, criterion8, criterion9, criterion10};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (int i = 1; i <= 10; ++i) selected.push_back(i);
  int failed = 0;
  for (int n : selected) {
    if (n < 1 || n > 10) continue;
    Outcome o;
    try {
      o = criteria[n - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
