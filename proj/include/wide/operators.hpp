#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "wide/constitutive.hpp"
#include "wide/mesh.hpp"

namespace wide {

/// Bilinear shape data at the 2x2 Gauss points of a uniform cell.
struct CellBasis {
  static constexpr int kPoints = 4;
  std::array<std::array<double, 4>, kPoints> n{};     ///< n[q][a]
  std::array<std::array<double, 4>, kPoints> dndx{};  ///< d/dx
  std::array<std::array<double, 4>, kPoints> dndy{};
  std::array<Eigen::Vector2d, kPoints> offset{};  ///< point minus lower-left node
  std::array<double, 4> mean_dndx{};              ///< cell averages of the gradients
  std::array<double, 4> mean_dndy{};
  double weight = 0.0;  ///< per point
  double area = 0.0;
};

CellBasis make_cell_basis(const ChannelMesh& mesh);

/// Two-point Gauss rule on an edge: s in (0,1) and weight fraction.
inline constexpr std::array<double, 2> kEdgePoints = {0.21132486540518711775, 0.78867513459481288225};

/// Pointwise rot v x v in 2D: omega * (-v2, v1).
template <class Scalar>
Eigen::Matrix<Scalar, 2, 1> curl_cross_point(Scalar omega, const Eigen::Matrix<Scalar, 2, 1>& v) {
  return {-omega * v.y(), omega * v.x()};
}

/// Interpolated value and gradient of a vector field at one Gauss point.
struct PointState {
  Eigen::Vector2d v;
  Eigen::Matrix2d grad;  ///< grad(i,j) = d v_i / d x_j

  double omega() const { return grad(1, 0) - grad(0, 1); }
  double div() const { return grad(0, 0) + grad(1, 1); }
  SymTensor2<double> sym() const { return {grad(0, 0), 0.5 * (grad(0, 1) + grad(1, 0)), grad(1, 1)}; }
};

PointState point_state(const CellBasis& basis, const std::array<int, 4>& cell, const Eigen::VectorXd& field, int q);

/// Gauss-point ordering: cell-major, 4 points per cell.
std::vector<SymTensor2<double>> sym_gradient(const ChannelMesh& mesh, const Eigen::VectorXd& field);
Eigen::VectorXd divergence(const ChannelMesh& mesh, const Eigen::VectorXd& field);
std::vector<Eigen::Vector2d> curl_cross(const ChannelMesh& mesh, const Eigen::VectorXd& field);
/// Physical coordinates of the Gauss points in the same ordering.
std::vector<Eigen::Vector2d> quadrature_points(const ChannelMesh& mesh);

/// Space-time velocity samples on a uniform time grid; column k is the dof
/// vector at t_k. Piecewise linear in time.
struct Trajectory {
  Eigen::VectorXd t;
  Eigen::MatrixXd v;

  int slabs() const { return static_cast<int>(t.size()) - 1; }
  double step() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
  double horizon() const { return t.size() ? t[t.size() - 1] : 0.0; }
  /// Linear interpolation in time.
  Eigen::VectorXd at(double time) const;
};

Trajectory steady_trajectory(const Eigen::VectorXd& field, double horizon, int slabs);

/// Exponentially weighted slab rule: weight_k = eps (e^{-t_k/eps} - e^{-t_{k+1}/eps}),
/// integrands sampled at slab midpoints.
struct TimeQuadrature {
  Eigen::VectorXd weights;
  Eigen::VectorXd midpoints;
};

TimeQuadrature exp_weight_quadrature(double eps, const Eigen::VectorXd& time_grid);

enum class Convection { rotational, standard };

/// (v_{k+1}-v_k)/h + rot v x v at the slab midpoint, per Gauss point.
std::vector<Eigen::Vector2d> wide_material_derivative(const Trajectory& traj, int slab, const ChannelMesh& mesh,
                                                      Convection form = Convection::rotational);

/// L2 space-time distance on [0, t_end], trapezoid in time; b is interpolated
/// linearly onto the time nodes of a.
double l2_distance(const ChannelMesh& mesh, const Trajectory& a, const Trajectory& b, double t_end);
double l2_norm(const ChannelMesh& mesh, const Trajectory& a, double t_end);

}  // namespace wide
