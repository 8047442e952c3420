#include "wide/constitutive.hpp"

#include <cmath>
#include <sstream>

namespace wide {

BulkEvaluation evaluate_bulk(const SymTensor2<double>& a, const ConstitutiveParams& p, bool stabilized) {
  const auto c = detail::bulk_law(p, stabilized);
  const double x = norm2(a);
  double m, phi;
  if (c.r == 2.0) {
    m = 2.0 * c.c2;
    phi = c.c2 * x;
  } else {
    const double k = std::pow(c.cr, 2.0 / (c.r - 2.0));
    const double l = std::log1p(k * x / c.c2);
    m = 2.0 * std::pow(c.c2, 0.5 * (c.r - 2.0)) * std::exp(0.5 * (c.r - 2.0) * l);
    phi = 2.0 * std::pow(c.c2, 0.5 * c.r) / (c.r * k) * std::expm1(0.5 * c.r * l);
  }
  if (c.c4 != 0.0) {
    m += c.c4 * x;
    phi += 0.25 * c.c4 * x * x;
  }
  if (c.cq != 0.0 && x > 0.0) {
    const double xq = std::exp(0.5 * (c.q - 2.0) * std::log(x));
    m += c.cq * xq;
    phi += c.cq / c.q * xq * x;
  }
  return {phi, m * a};
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ValidationReport validate_params(const ConstitutiveParams& p) {
  ValidationReport rep;
  auto error = [&](const std::string& m) {
    rep.fatal = true;
    rep.errors.push_back(m);
  };

  const std::pair<const char*, double> coeffs[] = {
      {"sigma2", p.sigma2}, {"sigma_r", p.sigma_r}, {"sigma4", p.sigma4}, {"sigma_q", p.sigma_q},
      {"rho2", p.rho2},     {"rho_r", p.rho_r},     {"rho4", p.rho4},     {"rho_q", p.rho_q},
      {"eps", p.eps}};
  for (const auto& [name, v] : coeffs)
    if (!(v > 0.0)) error(std::string(name) + " must be positive, got " + fmt(v));

  if (!(p.r >= 2.0)) {
    error("r=" + fmt(p.r) + " unsupported: the solver requires r >= 2 (shear-thinning laws are excluded)");
    return rep;
  }
  if (!(p.q > 1.0)) error("q must exceed 1, got " + fmt(p.q));
  if (rep.fatal) return rep;

  const double r_dual = p.r / (p.r - 1.0);
  const bool r_ok = p.r >= 2.2 && p.r < 4.0;
  const bool q_ok = p.q > 4.0 && p.q <= 3.0 * r_dual;
  rep.in_window = r_ok && q_ok;

  if (p.r == 2.0) {
    rep.notes.push_back("r=2 linear case: S(A)=2*sigma2*A, the classical Navier-Stokes law");
    if (p.sigma_r > p.sigma2)
      rep.notes.push_back("r=2: coercivity with unit constants needs sigma_r <= sigma2");
    if (p.rho_r > p.rho2) rep.notes.push_back("r=2: coercivity with unit constants needs rho_r <= rho2");
  } else if (p.r >= 4.0) {
    rep.notes.push_back("r=" + fmt(p.r) + " outside the window 11/5 <= r < 4 (sub-critical growth, non-fatal)");
  } else if (!r_ok) {
    rep.notes.push_back("r=" + fmt(p.r) + " outside the window 11/5 <= r < 4");
  }
  if (!q_ok)
    rep.notes.push_back("q=" + fmt(p.q) + " outside the window 4 < q <= 3r'=" + fmt(3.0 * r_dual));
  if (p.r > 2.0 && p.r < 4.0) {
    if (p.sigma2 > 1.0) rep.notes.push_back("sigma2 > 1: lower bound sigma2|A|^2 + sigma_r|A|^r not guaranteed");
    if (p.rho2 > 1.0) rep.notes.push_back("rho2 > 1: lower bound rho2|u|^2 + rho_r|u|^r not guaranteed");
  }
  rep.notes.push_back("min(sigma4, rho4) > c4/4 requires Korn constant estimate (min = " +
                      fmt(std::min(p.sigma4, p.rho4)) + ")");
  return rep;
}

}  // namespace wide
