#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "wide/assembly.hpp"
#include "wide/minimizer.hpp"

namespace wide {

SpaceTimePreconditioner::SpaceTimePreconditioner(const FlowProblem& problem, const ConstraintHandler& h,
                                                 const Eigen::VectorXd& time_grid) {
  const ChannelMesh& mesh = problem.mesh;
  const ConstitutiveParams& p = problem.params;
  if (time_grid.size() < 2) throw std::invalid_argument("time grid needs at least two nodes");
  for (int d = 0; d < mesh.dof_count(); ++d)
    if (!h.fixed[d]) free_.push_back(d);

  const double m_bulk = detail::law_factor(0.0, detail::bulk_law(p, true));
  const double m_wall = detail::law_factor(0.0, detail::wall_law(p, true));
  const SparseMatrix div = divergence_matrix(mesh);
  const SparseMatrix a_full = m_bulk * strain_matrix(mesh) + m_wall * wall_mass_matrix(mesh) +
                              (2.0 * h.kappa / mesh.cell_area()) * SparseMatrix(div.transpose() * div);
  const Eigen::MatrixXd a_dense(a_full), m_dense(mass_matrix(mesh));

  const int nf = static_cast<int>(free_.size());
  Eigen::MatrixXd af(nf, nf), mf(nf, nf);
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j) {
      af(i, j) = a_dense(free_[i], free_[j]);
      mf(i, j) = m_dense(free_[i], free_[j]);
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(af, mf);
  if (es.info() != Eigen::Success) throw std::runtime_error("preconditioner eigensolve failed");
  modes_ = es.eigenvectors();
  lambda_ = es.eigenvalues();

  eps_ = p.eps;
  h_ = time_grid[1] - time_grid[0];
  weights_ = exp_weight_quadrature(eps_, time_grid).weights;
}

void SpaceTimePreconditioner::apply(Eigen::MatrixXd& g) const {
  const int nf = static_cast<int>(free_.size());
  const int cols = static_cast<int>(g.cols());
  const int m = cols - 1;  // unknown time nodes 1..m
  if (m < 1) {
    g.setZero();
    return;
  }
  Eigen::MatrixXd gf(nf, m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < nf; ++i) gf(i, k) = g(free_[i], k + 1);
  Eigen::MatrixXd y = modes_.transpose() * gf;

  const double inv_h2 = eps_ / (h_ * h_);
  const Eigen::ArrayXd quarter = 0.25 * lambda_.array();
  // Thomas algorithm over time, vectorized over modes. Node j (0-based here)
  // is time node j+1; slab j joins time nodes j and j+1.
  Eigen::ArrayXXd cprime(nf, m);
  Eigen::ArrayXd prev_c = Eigen::ArrayXd::Zero(nf);
  for (int j = 0; j < m; ++j) {
    Eigen::ArrayXd diag = weights_[j] * (inv_h2 + quarter);
    if (j + 1 < m) diag += weights_[j + 1] * (inv_h2 + quarter);
    Eigen::ArrayXd lower = Eigen::ArrayXd::Zero(nf);
    if (j > 0) lower = weights_[j] * (quarter - inv_h2);
    const Eigen::ArrayXd denom = diag - lower * prev_c;
    Eigen::ArrayXd upper = Eigen::ArrayXd::Zero(nf);
    if (j + 1 < m) upper = weights_[j + 1] * (quarter - inv_h2);
    cprime.col(j) = upper / denom;
    y.col(j) = ((y.col(j).array() - (j > 0 ? (lower * y.col(j - 1).array()).eval() : Eigen::ArrayXd::Zero(nf))) / denom)
                   .matrix();
    prev_c = cprime.col(j);
  }
  for (int j = m - 2; j >= 0; --j) y.col(j).array() -= cprime.col(j) * y.col(j + 1).array();

  const Eigen::MatrixXd xf = modes_ * y;
  g.setZero();
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < nf; ++i) g(free_[i], k + 1) = xf(i, k);
}

}  // namespace wide
