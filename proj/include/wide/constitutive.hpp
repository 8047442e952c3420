#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace wide {

/// Coefficients of the bulk stress S, the wall friction s and their
/// eps-stabilized variants.
struct ConstitutiveParams {
  double r = 2.5;
  double q = 4.5;
  double sigma2 = 0.05;
  double sigma_r = 0.05;
  double sigma4 = 0.05;
  double sigma_q = 0.05;
  double rho2 = 0.05;
  double rho_r = 0.05;
  double rho4 = 0.05;
  double rho_q = 0.05;
  double eps = 0.1;

  bool operator==(const ConstitutiveParams&) const = default;
};

/// Symmetric 2x2 tensor stored by its three independent entries.
template <class Scalar>
struct SymTensor2 {
  Scalar xx{0};
  Scalar xy{0};
  Scalar yy{0};

  static SymTensor2 from_matrix(const Eigen::Matrix<Scalar, 2, 2>& m) {
    return {m(0, 0), Scalar(0.5) * (m(0, 1) + m(1, 0)), m(1, 1)};
  }
  Eigen::Matrix<Scalar, 2, 2> matrix() const {
    Eigen::Matrix<Scalar, 2, 2> m;
    m << xx, xy, xy, yy;
    return m;
  }
};

template <class Scalar>
SymTensor2<Scalar> operator+(const SymTensor2<Scalar>& a, const SymTensor2<Scalar>& b) {
  return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy};
}
template <class Scalar>
SymTensor2<Scalar> operator-(const SymTensor2<Scalar>& a, const SymTensor2<Scalar>& b) {
  return {a.xx - b.xx, a.xy - b.xy, a.yy - b.yy};
}
template <class Scalar>
SymTensor2<Scalar> operator*(Scalar s, const SymTensor2<Scalar>& a) {
  return {s * a.xx, s * a.xy, s * a.yy};
}

/// Double-dot product A:B.
template <class Scalar>
Scalar contract(const SymTensor2<Scalar>& a, const SymTensor2<Scalar>& b) {
  return a.xx * b.xx + Scalar(2) * a.xy * b.xy + a.yy * b.yy;
}
/// Squared Frobenius norm.
template <class Scalar>
Scalar norm2(const SymTensor2<Scalar>& a) {
  return contract(a, a);
}

namespace detail {

// One family of laws covers both S and s: a coefficient pair (c2, cr) for the
// power-law part and (c4, cq) for the stabilizers, all acting on x = |A|^2.
template <class Scalar>
struct LawCoefficients {
  double r, q, c2, cr, c4, cq;
};

inline LawCoefficients<double> bulk_law(const ConstitutiveParams& p, bool stabilized) {
  const double e = stabilized ? p.eps : 0.0;
  return {p.r, p.q, p.sigma2, p.sigma_r, e * p.sigma4, e * p.sigma_q};
}
inline LawCoefficients<double> wall_law(const ConstitutiveParams& p, bool stabilized) {
  const double e = stabilized ? p.eps : 0.0;
  return {p.r, p.q, p.rho2, p.rho_r, e * p.rho4, e * p.rho_q};
}

template <class Scalar>
Scalar pow_nonneg(Scalar x, double e) {
  using std::exp;
  using std::log;
  return x > Scalar(0) ? Scalar(exp(e * log(x))) : Scalar(0);
}

/// Scalar multiplier m(x) with stress = m(|A|^2) A.
template <class Scalar>
Scalar law_factor(Scalar x, const LawCoefficients<double>& c) {
  using std::exp;
  using std::log1p;
  Scalar m;
  if (c.r == 2.0) {
    m = Scalar(2.0 * c.c2);
  } else {
    const double k = std::pow(c.cr, 2.0 / (c.r - 2.0));
    const double theta = 0.5 * (c.r - 2.0);
    m = Scalar(2.0 * std::pow(c.c2, theta)) * exp(theta * log1p(k * x / c.c2));
  }
  if (c.c4 != 0.0) m += Scalar(c.c4) * x;
  if (c.cq != 0.0) m += Scalar(c.cq) * pow_nonneg(x, 0.5 * (c.q - 2.0));
  return m;
}

/// Potential Phi(x) = int_0^1 m(lambda^2 x) lambda x d lambda.
template <class Scalar>
Scalar law_potential(Scalar x, const LawCoefficients<double>& c) {
  using std::expm1;
  using std::log1p;
  Scalar phi;
  if (c.r == 2.0) {
    phi = Scalar(c.c2) * x;
  } else {
    const double k = std::pow(c.cr, 2.0 / (c.r - 2.0));
    const double half_r = 0.5 * c.r;
    phi = Scalar(2.0 * std::pow(c.c2, half_r) / (c.r * k)) * expm1(half_r * log1p(k * x / c.c2));
  }
  if (c.c4 != 0.0) phi += Scalar(0.25 * c.c4) * x * x;
  if (c.cq != 0.0) phi += Scalar(c.cq / c.q) * pow_nonneg(x, 0.5 * c.q);
  return phi;
}

/// Derivative m'(x); used by linearizations.
template <class Scalar>
Scalar law_factor_derivative(Scalar x, const LawCoefficients<double>& c) {
  using std::exp;
  using std::log1p;
  Scalar d(0);
  if (c.r != 2.0) {
    const double k = std::pow(c.cr, 2.0 / (c.r - 2.0));
    const double theta = 0.5 * (c.r - 2.0);
    d = Scalar(2.0 * theta * k * std::pow(c.c2, theta - 1.0)) * exp((theta - 1.0) * log1p(k * x / c.c2));
  }
  if (c.c4 != 0.0) d += Scalar(c.c4);
  if (c.cq != 0.0) d += Scalar(c.cq * 0.5 * (c.q - 2.0)) * pow_nonneg(x, 0.5 * (c.q - 4.0));
  return d;
}

}  // namespace detail

/// S(A), or S_eps(A) when stabilized.
template <class Scalar>
SymTensor2<Scalar> stress_bulk(const SymTensor2<Scalar>& a, const ConstitutiveParams& p, bool stabilized) {
  return detail::law_factor(norm2(a), detail::bulk_law(p, stabilized)) * a;
}

/// s(u), or s_eps(u) when stabilized.
template <class Scalar>
Eigen::Matrix<Scalar, 2, 1> stress_boundary(const Eigen::Matrix<Scalar, 2, 1>& u, const ConstitutiveParams& p,
                                            bool stabilized) {
  return detail::law_factor(u.squaredNorm(), detail::wall_law(p, stabilized)) * u;
}

/// int_0^1 S_eps(lambda A):A d lambda in closed form.
template <class Scalar>
Scalar potential_bulk(const SymTensor2<Scalar>& a, const ConstitutiveParams& p, bool stabilized) {
  return detail::law_potential(norm2(a), detail::bulk_law(p, stabilized));
}

template <class Scalar>
Scalar potential_boundary(const Eigen::Matrix<Scalar, 2, 1>& u, const ConstitutiveParams& p, bool stabilized) {
  return detail::law_potential(u.squaredNorm(), detail::wall_law(p, stabilized));
}

/// Potential and stress together, sharing the transcendental work.
struct BulkEvaluation {
  double potential;
  SymTensor2<double> stress;
};
BulkEvaluation evaluate_bulk(const SymTensor2<double>& a, const ConstitutiveParams& p, bool stabilized);

struct ValidationReport {
  bool fatal = false;
  bool in_window = false;
  std::vector<std::string> errors;
  std::vector<std::string> notes;
};

ValidationReport validate_params(const ConstitutiveParams& p);

}  // namespace wide
