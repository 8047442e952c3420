#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "wide/scenario.hpp"

namespace wide {

void write_trajectory(const std::string& path, const Trajectory& traj, const ChannelMesh& mesh,
                      const std::map<std::string, std::string>& meta) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << std::setprecision(17);
  os << "t,node_id,x,y,vx,vy\n";
  for (int k = 0; k < traj.t.size(); ++k)
    for (int n = 0; n < mesh.node_count(); ++n)
      os << traj.t[k] << ',' << n << ',' << mesh.nodes[n].x() << ',' << mesh.nodes[n].y() << ',' << traj.v(2 * n, k)
         << ',' << traj.v(2 * n + 1, k) << '\n';
  std::ofstream ms(path + ".meta");
  if (!ms) throw std::runtime_error("cannot write " + path + ".meta");
  ms << "nodes=" << mesh.node_count() << '\n' << "time_nodes=" << traj.t.size() << '\n';
  for (const auto& [k, v] : meta) ms << k << '=' << v << '\n';
}

TrajectoryFile read_trajectory(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,node_id,x,y,vx,vy", 0) != 0)
    throw std::runtime_error(path + ": missing trajectory header");
  struct Row {
    double t, x, y, vx, vy;
    int id;
  };
  std::vector<Row> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    Row r{};
    if (!(ss >> r.t >> r.id >> r.x >> r.y >> r.vx >> r.vy))
      throw std::runtime_error(path + ": malformed line " + std::to_string(lineno));
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error(path + ": no samples");
  int nodes = 0;
  for (const auto& r : rows) nodes = std::max(nodes, r.id + 1);
  if (rows.size() % nodes) throw std::runtime_error(path + ": sample count is not a multiple of the node count");
  const int nt = static_cast<int>(rows.size()) / nodes;

  TrajectoryFile f;
  f.trajectory.t.resize(nt);
  f.trajectory.v.resize(2 * nodes, nt);
  f.nodes.resize(nodes);
  for (int k = 0; k < nt; ++k)
    for (int n = 0; n < nodes; ++n) {
      const Row& r = rows[static_cast<std::size_t>(k) * nodes + n];
      if (r.id != n) throw std::runtime_error(path + ": rows must be ordered by time then node");
      if (n == 0)
        f.trajectory.t[k] = r.t;
      else if (r.t != f.trajectory.t[k])
        throw std::runtime_error(path + ": inconsistent time stamp in block " + std::to_string(k));
      f.trajectory.v(2 * n, k) = r.vx;
      f.trajectory.v(2 * n + 1, k) = r.vy;
      f.nodes[n] = {r.x, r.y};
    }

  std::ifstream ms(path + ".meta");
  while (ms && std::getline(ms, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) f.meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return f;
}

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticRow>& rows) {
  const auto old = os.precision(17);
  os << "eps,quantity,value\n";
  for (const auto& r : rows) os << r.eps << ',' << r.quantity << ',' << r.value << '\n';
  os.precision(old);
}

void write_diagnostics_text(std::ostream& os, const std::vector<DiagnosticRow>& rows) {
  std::size_t width = 8;
  for (const auto& r : rows) width = std::max(width, r.quantity.size());
  const auto old = os.precision(17);
  bool first = true;
  double eps = -1.0;
  for (const auto& r : rows) {
    if (first || r.eps != eps) {
      os << (first ? "" : "\n") << (r.eps > 0.0 ? "eps = " : "reference run") ;
      if (r.eps > 0.0) os << r.eps;
      os << '\n';
      eps = r.eps;
      first = false;
    }
    os << "  " << std::left << std::setw(static_cast<int>(width)) << r.quantity << "  " << r.value << '\n';
  }
  os << std::right;
  os.precision(old);
}

}  // namespace wide
