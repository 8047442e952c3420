#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "wide/mesh.hpp"

namespace wide {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Consistent vector mass matrix, int phi.psi.
SparseMatrix mass_matrix(const ChannelMesh& mesh);
/// int D(phi):D(psi).
SparseMatrix strain_matrix(const ChannelMesh& mesh);
/// int grad(phi):grad(psi).
SparseMatrix laplace_matrix(const ChannelMesh& mesh);
/// int_{walls} phi.psi with a two-point edge rule.
SparseMatrix wall_mass_matrix(const ChannelMesh& mesh);
/// Row c holds int_{cell c} div(phi); size cells x dofs.
SparseMatrix divergence_matrix(const ChannelMesh& mesh);

/// Boundary L2 inner product restricted to one selector.
SparseMatrix boundary_mass_matrix(const ChannelMesh& mesh, BoundarySelector which);

}  // namespace wide
