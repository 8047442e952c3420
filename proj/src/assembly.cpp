#include "wide/assembly.hpp"

#include <vector>

#include "wide/operators.hpp"

namespace wide {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix finish(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Local 8x8 matrix from a bilinear form evaluated per Gauss point.
template <class Form>
SparseMatrix assemble_cells(const ChannelMesh& mesh, Form&& form) {
  const CellBasis b = make_cell_basis(mesh);
  Triplets t;
  t.reserve(64 * mesh.cell_count());
  for (const auto& c : mesh.cells) {
    Eigen::Matrix<double, 8, 8> local = Eigen::Matrix<double, 8, 8>::Zero();
    for (int q = 0; q < 4; ++q) form(b, q, local);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        if (local(i, j) != 0.0) t.emplace_back(2 * c[i / 2] + i % 2, 2 * c[j / 2] + j % 2, local(i, j));
  }
  return finish(mesh.dof_count(), mesh.dof_count(), t);
}

}  // namespace

SparseMatrix mass_matrix(const ChannelMesh& mesh) {
  return assemble_cells(mesh, [](const CellBasis& b, int q, Eigen::Matrix<double, 8, 8>& m) {
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < 4; ++c) {
        const double v = b.weight * b.n[q][a] * b.n[q][c];
        m(2 * a, 2 * c) += v;
        m(2 * a + 1, 2 * c + 1) += v;
      }
  });
}

SparseMatrix strain_matrix(const ChannelMesh& mesh) {
  return assemble_cells(mesh, [](const CellBasis& b, int q, Eigen::Matrix<double, 8, 8>& m) {
    // D(N e_x) = [[Nx, Ny/2],[Ny/2, 0]], D(N e_y) = [[0, Nx/2],[Nx/2, Ny]]
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < 4; ++c) {
        const double ax = b.dndx[q][a], ay = b.dndy[q][a], cx = b.dndx[q][c], cy = b.dndy[q][c];
        m(2 * a, 2 * c) += b.weight * (ax * cx + 0.5 * ay * cy);
        m(2 * a, 2 * c + 1) += b.weight * 0.5 * ay * cx;
        m(2 * a + 1, 2 * c) += b.weight * 0.5 * ax * cy;
        m(2 * a + 1, 2 * c + 1) += b.weight * (ay * cy + 0.5 * ax * cx);
      }
  });
}

SparseMatrix laplace_matrix(const ChannelMesh& mesh) {
  return assemble_cells(mesh, [](const CellBasis& b, int q, Eigen::Matrix<double, 8, 8>& m) {
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < 4; ++c) {
        const double v = b.weight * (b.dndx[q][a] * b.dndx[q][c] + b.dndy[q][a] * b.dndy[q][c]);
        m(2 * a, 2 * c) += v;
        m(2 * a + 1, 2 * c + 1) += v;
      }
  });
}

SparseMatrix boundary_mass_matrix(const ChannelMesh& mesh, BoundarySelector which) {
  Triplets t;
  for (const auto& e : mesh.edges) {
    if (e.tag != which.tag) continue;
    if (which.tag == BoundaryTag::outflow && which.outlet >= 0 && e.outlet != which.outlet) continue;
    for (double s : kEdgePoints) {
      const double w = 0.5 * e.length;
      const double na = 1.0 - s, nb = s;
      const int ids[2] = {e.a, e.b};
      const double vals[2] = {na, nb};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int c = 0; c < 2; ++c) t.emplace_back(2 * ids[i] + c, 2 * ids[j] + c, w * vals[i] * vals[j]);
    }
  }
  return finish(mesh.dof_count(), mesh.dof_count(), t);
}

SparseMatrix wall_mass_matrix(const ChannelMesh& mesh) {
  return boundary_mass_matrix(mesh, {BoundaryTag::wall});
}

SparseMatrix divergence_matrix(const ChannelMesh& mesh) {
  const CellBasis b = make_cell_basis(mesh);
  Triplets t;
  for (int c = 0; c < mesh.cell_count(); ++c)
    for (int a = 0; a < 4; ++a) {
      t.emplace_back(c, 2 * mesh.cells[c][a], b.area * b.mean_dndx[a]);
      t.emplace_back(c, 2 * mesh.cells[c][a] + 1, b.area * b.mean_dndy[a]);
    }
  return finish(mesh.cell_count(), mesh.dof_count(), t);
}

}  // namespace wide
