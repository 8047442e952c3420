#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace wide {

enum class BoundaryTag { dirichlet, wall, outflow };
enum class OutletLayout { single, two_outlets };

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::wall;
  int outlet = -1;  ///< outlet index for outflow edges
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();
  double length = 0.0;
};

/// Selects a subset of boundary edges: a tag, or a single outlet when
/// tag is outflow and outlet >= 0.
struct BoundarySelector {
  BoundaryTag tag;
  int outlet = -1;
};

/// Uniform nx-by-ny quadrilateral grid on [0,length]x[0,height].
/// Node (i,j) has index j*(nx+1)+i; velocity dofs are interleaved (2n, 2n+1).
/// Left edge is the Dirichlet inlet, top and bottom are walls, the right edge
/// carries one or two outlets.
struct ChannelMesh {
  int nx = 0;
  int ny = 0;
  double length = 0.0;
  double height = 0.0;
  double hx = 0.0;
  double hy = 0.0;
  OutletLayout layout = OutletLayout::single;
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 4>> cells;  ///< counter-clockwise from lower-left
  std::vector<BoundaryEdge> edges;
  int outlet_count = 1;
  std::vector<double> flux_targets;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int dof_count() const { return 2 * node_count(); }
  int cell_count() const { return static_cast<int>(cells.size()); }
  int node(int i, int j) const { return j * (nx + 1) + i; }
  double cell_area() const { return hx * hy; }
  double area() const { return length * height; }

  /// Per dof: true when the value is prescribed at every time (inlet nodes,
  /// wall-normal components).
  std::vector<bool> fixed_dofs() const;
  /// Per dof weight c with int_{Gamma_F^i} v.n = c.v (trapezoid rule).
  Eigen::VectorXd flux_row(int outlet) const;
  /// Outlet edges ordered along the boundary.
  std::vector<int> outlet_edges(int outlet) const;
};

ChannelMesh build_rect_channel(int nx, int ny, double length, double height,
                               OutletLayout layout = OutletLayout::single);

/// Same geometry with new outlet flux targets; nodes and cells are untouched.
ChannelMesh with_flux_targets(ChannelMesh mesh, std::vector<double> targets);

/// Trapezoid quadrature of v.n over the selected boundary part.
double boundary_flux(const ChannelMesh& mesh, const Eigen::VectorXd& field, BoundarySelector which);

/// Sum of edge-length-weighted outward normals (zero for a closed boundary).
Eigen::Vector2d normal_closure(const ChannelMesh& mesh);

struct InletProfile {
  enum class Kind { zero, uniform, parabolic };
  Kind kind = Kind::parabolic;
  double peak = 1.0;

  /// Inflow velocity at height y (pointing into the domain, +x).
  Eigen::Vector2d value(double y, double height) const;
};

/// Steady admissible field v0 built from a discrete stream function.
struct ExtensionField {
  Eigen::VectorXd velocity;  ///< dof vector, constant in time
  Eigen::VectorXd stream;    ///< nodal stream function values
  double inlet_flux = 0.0;
  std::vector<double> outlet_fluxes;
};

/// Throws std::invalid_argument("net boundary flux mismatch ...") when the
/// requested outlet fluxes do not balance the inlet flux. Empty fluxes means
/// an even split of the inlet flux.
ExtensionField build_extension_field(const ChannelMesh& mesh, const InletProfile& inlet, std::vector<double> fluxes);

/// Cell-mean divergence (exact for the bilinear interpolant).
Eigen::VectorXd cell_divergence(const ChannelMesh& mesh, const Eigen::VectorXd& field);

/// Legacy ASCII VTK unstructured grid: quads plus boundary line cells, tags in
/// CELL_DATA (0 interior, 1 inlet, 2 wall, 3+i outlet i).
void write_vtk(std::ostream& os, const ChannelMesh& mesh, const Eigen::VectorXd* velocity = nullptr);

}  // namespace wide
