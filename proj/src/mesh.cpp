#include "wide/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wide {

namespace {

double smoothstep(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

// Right-edge edges j in [begin, end) belong to outlet 0, [end, ny-begin') is
// a wall, the rest is outlet 1.
struct RightSplit {
  int out0_end;
  int out1_begin;
};

RightSplit right_split(int ny, OutletLayout layout) {
  if (layout == OutletLayout::single) return {ny, ny};
  const int k = std::max(1, ny / 3);
  return {k, ny - k};
}

}  // namespace

ChannelMesh build_rect_channel(int nx, int ny, double length, double height, OutletLayout layout) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("channel needs at least 2x2 cells");
  if (!(length > 0.0) || !(height > 0.0)) throw std::invalid_argument("channel dimensions must be positive");
  if (layout == OutletLayout::two_outlets && ny < 3)
    throw std::invalid_argument("two outlets need ny >= 3 to separate them by a wall");

  ChannelMesh m;
  m.nx = nx;
  m.ny = ny;
  m.length = length;
  m.height = height;
  m.hx = length / nx;
  m.hy = height / ny;
  m.layout = layout;
  m.outlet_count = layout == OutletLayout::single ? 1 : 2;
  m.flux_targets.assign(m.outlet_count, 0.0);

  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) m.nodes.emplace_back(i * m.hx, j * m.hy);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      m.cells.push_back({m.node(i, j), m.node(i + 1, j), m.node(i + 1, j + 1), m.node(i, j + 1)});

  auto add = [&](int a, int b, BoundaryTag tag, int outlet, Eigen::Vector2d n) {
    m.edges.push_back({a, b, tag, outlet, n, (m.nodes[b] - m.nodes[a]).norm()});
  };
  for (int i = 0; i < nx; ++i) add(m.node(i, 0), m.node(i + 1, 0), BoundaryTag::wall, -1, {0.0, -1.0});
  const RightSplit split = right_split(ny, layout);
  for (int j = 0; j < ny; ++j) {
    const int a = m.node(nx, j), b = m.node(nx, j + 1);
    if (j < split.out0_end)
      add(a, b, BoundaryTag::outflow, 0, {1.0, 0.0});
    else if (j < split.out1_begin)
      add(a, b, BoundaryTag::wall, -1, {1.0, 0.0});
    else
      add(a, b, BoundaryTag::outflow, 1, {1.0, 0.0});
  }
  for (int i = nx; i > 0; --i) add(m.node(i, ny), m.node(i - 1, ny), BoundaryTag::wall, -1, {0.0, 1.0});
  for (int j = ny; j > 0; --j) add(m.node(0, j), m.node(0, j - 1), BoundaryTag::dirichlet, -1, {-1.0, 0.0});
  return m;
}

ChannelMesh with_flux_targets(ChannelMesh mesh, std::vector<double> targets) {
  if (static_cast<int>(targets.size()) != mesh.outlet_count)
    throw std::invalid_argument("flux target count does not match outlet count");
  mesh.flux_targets = std::move(targets);
  return mesh;
}

std::vector<bool> ChannelMesh::fixed_dofs() const {
  std::vector<bool> fixed(dof_count(), false);
  for (const auto& e : edges) {
    for (int n : {e.a, e.b}) {
      if (e.tag == BoundaryTag::dirichlet) {
        fixed[2 * n] = fixed[2 * n + 1] = true;
      } else if (e.tag == BoundaryTag::wall) {
        fixed[2 * n + (std::abs(e.normal.x()) > 0.5 ? 0 : 1)] = true;
      }
    }
  }
  return fixed;
}

Eigen::VectorXd ChannelMesh::flux_row(int outlet) const {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(dof_count());
  for (const auto& e : edges) {
    if (e.tag != BoundaryTag::outflow || e.outlet != outlet) continue;
    for (int n : {e.a, e.b})
      for (int c = 0; c < 2; ++c) row[2 * n + c] += 0.5 * e.length * e.normal[c];
  }
  return row;
}

std::vector<int> ChannelMesh::outlet_edges(int outlet) const {
  std::vector<int> ids;
  for (int k = 0; k < static_cast<int>(edges.size()); ++k)
    if (edges[k].tag == BoundaryTag::outflow && edges[k].outlet == outlet) ids.push_back(k);
  return ids;
}

double boundary_flux(const ChannelMesh& mesh, const Eigen::VectorXd& field, BoundarySelector which) {
  if (field.size() != mesh.dof_count()) throw std::invalid_argument("field size does not match mesh");
  if (which.tag == BoundaryTag::outflow && which.outlet >= mesh.outlet_count)
    throw std::invalid_argument("unknown outlet index " + std::to_string(which.outlet));
  double flux = 0.0;
  for (const auto& e : mesh.edges) {
    if (e.tag != which.tag) continue;
    if (which.tag == BoundaryTag::outflow && which.outlet >= 0 && e.outlet != which.outlet) continue;
    const Eigen::Vector2d va = field.segment<2>(2 * e.a), vb = field.segment<2>(2 * e.b);
    flux += 0.5 * e.length * (va + vb).dot(e.normal);
  }
  return flux;
}

Eigen::Vector2d normal_closure(const ChannelMesh& mesh) {
  Eigen::Vector2d s = Eigen::Vector2d::Zero();
  for (const auto& e : mesh.edges) s += e.length * e.normal;
  return s;
}

Eigen::Vector2d InletProfile::value(double y, double height) const {
  switch (kind) {
    case Kind::zero:
      return Eigen::Vector2d::Zero();
    case Kind::uniform:
      return {peak, 0.0};
    case Kind::parabolic: {
      const double s = y / height;
      return {4.0 * peak * s * (1.0 - s), 0.0};
    }
  }
  return Eigen::Vector2d::Zero();
}

ExtensionField build_extension_field(const ChannelMesh& mesh, const InletProfile& inlet, std::vector<double> fluxes) {
  const int nx = mesh.nx, ny = mesh.ny;
  const double hx = mesh.hx, hy = mesh.hy;

  std::vector<Eigen::Vector2d> uin(ny + 1);
  for (int j = 0; j <= ny; ++j) uin[j] = inlet.value(j * hy, mesh.height);

  std::vector<double> psi_in(ny + 1, 0.0);
  for (int j = 0; j < ny; ++j) psi_in[j + 1] = psi_in[j] + 0.5 * hy * (uin[j].x() + uin[j + 1].x());
  const double f_in = psi_in[ny];

  if (fluxes.empty()) fluxes.assign(mesh.outlet_count, f_in / mesh.outlet_count);
  if (static_cast<int>(fluxes.size()) != mesh.outlet_count)
    throw std::invalid_argument("expected " + std::to_string(mesh.outlet_count) + " outlet fluxes");
  double total = 0.0;
  for (double f : fluxes) total += f;
  if (std::abs(total - f_in) > 1e-10 * std::max(1.0, std::abs(f_in)))
    throw std::invalid_argument("net boundary flux mismatch: inlet " + std::to_string(f_in) + " vs outlets " +
                                std::to_string(total));

  // stream function along the right edge
  std::vector<double> psi_out(ny + 1, 0.0);
  if (mesh.layout == OutletLayout::single) {
    for (int j = 0; j <= ny; ++j) psi_out[j] = f_in != 0.0 ? psi_in[j] * (fluxes[0] / f_in) : 0.0;
  } else {
    const RightSplit split = right_split(ny, mesh.layout);
    for (int j = 0; j <= ny; ++j) {
      if (j <= split.out0_end)
        psi_out[j] = fluxes[0] * smoothstep(double(j) / split.out0_end);
      else if (j <= split.out1_begin)
        psi_out[j] = fluxes[0];
      else
        psi_out[j] = fluxes[0] + fluxes[1] * smoothstep(double(j - split.out1_begin) / (ny - split.out1_begin));
    }
  }

  ExtensionField ext;
  ext.inlet_flux = f_in;
  ext.outlet_fluxes = fluxes;
  ext.stream.resize(mesh.node_count());
  for (int i = 0; i <= nx; ++i) {
    const double s = smoothstep(mesh.nodes[mesh.node(i, 0)].x() / mesh.length);
    for (int j = 0; j <= ny; ++j) ext.stream[mesh.node(i, j)] = (1.0 - s) * psi_in[j] + s * psi_out[j];
  }
  auto psi = [&](int i, int j) { return ext.stream[mesh.node(i, j)]; };

  ext.velocity = Eigen::VectorXd::Zero(mesh.dof_count());
  // Horizontal component: trapezoid flux through each vertical edge equals the
  // stream-function jump; one free alternating mode per column.
  const RightSplit split = right_split(ny, mesh.layout);
  for (int i = 0; i <= nx; ++i) {
    Eigen::VectorXd p(ny + 1);
    p[0] = 0.0;
    for (int j = 0; j < ny; ++j) p[j + 1] = 2.0 * (psi(i, j + 1) - psi(i, j)) / hy - p[j];
    auto sign = [](int j) { return (j % 2 == 0) ? 1.0 : -1.0; };
    double c;
    if (i == 0) {
      c = uin[0].x();
    } else if (i == nx && mesh.layout == OutletLayout::two_outlets) {
      const int jw = split.out0_end;
      c = -p[jw] * sign(jw);
    } else {
      double acc = 0.0;
      for (int j = 0; j <= ny; ++j) {
        double target;
        if (j == 0)
          target = (psi(i, 1) - psi(i, 0)) / hy;
        else if (j == ny)
          target = (psi(i, ny) - psi(i, ny - 1)) / hy;
        else
          target = (psi(i, j + 1) - psi(i, j - 1)) / (2.0 * hy);
        acc += (target - p[j]) * sign(j);
      }
      c = acc / (ny + 1);
    }
    for (int j = 0; j <= ny; ++j) ext.velocity[2 * mesh.node(i, j)] = p[j] + sign(j) * c;
  }
  // Vertical component: same construction along rows, anchored at the inlet.
  for (int j = 0; j <= ny; ++j) {
    double v = uin[j].y();
    ext.velocity[2 * mesh.node(0, j) + 1] = v;
    for (int i = 0; i < nx; ++i) {
      v = -2.0 * (psi(i + 1, j) - psi(i, j)) / hx - v;
      ext.velocity[2 * mesh.node(i + 1, j) + 1] = v;
    }
  }
  for (int j = 0; j <= ny; ++j) ext.velocity.segment<2>(2 * mesh.node(0, j)) = uin[j];
  // wall-normal components are zero by construction; remove round-off
  for (const auto& e : mesh.edges)
    if (e.tag == BoundaryTag::wall)
      for (int n : {e.a, e.b}) ext.velocity[2 * n + (std::abs(e.normal.x()) > 0.5 ? 0 : 1)] = 0.0;
  return ext;
}

Eigen::VectorXd cell_divergence(const ChannelMesh& mesh, const Eigen::VectorXd& v) {
  Eigen::VectorXd d(mesh.cell_count());
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto& n = mesh.cells[c];
    const double dudx = (v[2 * n[1]] + v[2 * n[2]] - v[2 * n[0]] - v[2 * n[3]]) / (2.0 * mesh.hx);
    const double dvdy = (v[2 * n[3] + 1] + v[2 * n[2] + 1] - v[2 * n[0] + 1] - v[2 * n[1] + 1]) / (2.0 * mesh.hy);
    d[c] = dudx + dvdy;
  }
  return d;
}

void write_vtk(std::ostream& os, const ChannelMesh& mesh, const Eigen::VectorXd* velocity) {
  const int nc = mesh.cell_count(), ne = static_cast<int>(mesh.edges.size());
  os << "# vtk DataFile Version 3.0\nchannel mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << std::setprecision(17);
  os << "POINTS " << mesh.node_count() << " double\n";
  for (const auto& p : mesh.nodes) os << p.x() << ' ' << p.y() << " 0\n";
  os << "CELLS " << nc + ne << ' ' << 5 * nc + 3 * ne << '\n';
  for (const auto& c : mesh.cells) os << "4 " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
  for (const auto& e : mesh.edges) os << "2 " << e.a << ' ' << e.b << '\n';
  os << "CELL_TYPES " << nc + ne << '\n';
  for (int c = 0; c < nc; ++c) os << "9\n";
  for (int e = 0; e < ne; ++e) os << "3\n";
  os << "CELL_DATA " << nc + ne << "\nSCALARS boundary_tag int 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < nc; ++c) os << "0\n";
  for (const auto& e : mesh.edges) {
    int tag = 2;
    if (e.tag == BoundaryTag::dirichlet) tag = 1;
    if (e.tag == BoundaryTag::outflow) tag = 3 + e.outlet;
    os << tag << '\n';
  }
  if (velocity) {
    os << "POINT_DATA " << mesh.node_count() << "\nVECTORS velocity double\n";
    for (int n = 0; n < mesh.node_count(); ++n) os << (*velocity)[2 * n] << ' ' << (*velocity)[2 * n + 1] << " 0\n";
  }
}

}  // namespace wide
