#include "wide/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace wide {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : "\n") + x;
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("expected a number, got '" + s + "'");
  return v;
}

long to_long(const std::string& s) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list");
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = {
      {"geometry.nx", [](RunConfig& c, const std::string& v) { c.geometry.nx = static_cast<int>(to_long(v)); }},
      {"geometry.ny", [](RunConfig& c, const std::string& v) { c.geometry.ny = static_cast<int>(to_long(v)); }},
      {"geometry.length", [](RunConfig& c, const std::string& v) { c.geometry.length = to_double(v); }},
      {"geometry.height", [](RunConfig& c, const std::string& v) { c.geometry.height = to_double(v); }},
      {"geometry.layout",
       [](RunConfig& c, const std::string& v) {
         if (v == "single")
           c.geometry.layout = OutletLayout::single;
         else if (v == "two_outlets")
           c.geometry.layout = OutletLayout::two_outlets;
         else
           throw std::invalid_argument("layout must be single or two_outlets");
       }},
      {"physics.r", [](RunConfig& c, const std::string& v) { c.physics.params.r = to_double(v); }},
      {"physics.q", [](RunConfig& c, const std::string& v) { c.physics.params.q = to_double(v); }},
      {"physics.sigma2", [](RunConfig& c, const std::string& v) { c.physics.params.sigma2 = to_double(v); }},
      {"physics.sigma_r", [](RunConfig& c, const std::string& v) { c.physics.params.sigma_r = to_double(v); }},
      {"physics.sigma4", [](RunConfig& c, const std::string& v) { c.physics.params.sigma4 = to_double(v); }},
      {"physics.sigma_q", [](RunConfig& c, const std::string& v) { c.physics.params.sigma_q = to_double(v); }},
      {"physics.rho2", [](RunConfig& c, const std::string& v) { c.physics.params.rho2 = to_double(v); }},
      {"physics.rho_r", [](RunConfig& c, const std::string& v) { c.physics.params.rho_r = to_double(v); }},
      {"physics.rho4", [](RunConfig& c, const std::string& v) { c.physics.params.rho4 = to_double(v); }},
      {"physics.rho_q", [](RunConfig& c, const std::string& v) { c.physics.params.rho_q = to_double(v); }},
      {"physics.fx", [](RunConfig& c, const std::string& v) { c.physics.fx = to_double(v); }},
      {"physics.fy", [](RunConfig& c, const std::string& v) { c.physics.fy = to_double(v); }},
      {"data.inlet",
       [](RunConfig& c, const std::string& v) {
         if (v == "zero")
           c.data.inlet = InletProfile::Kind::zero;
         else if (v == "uniform")
           c.data.inlet = InletProfile::Kind::uniform;
         else if (v == "parabolic")
           c.data.inlet = InletProfile::Kind::parabolic;
         else
           throw std::invalid_argument("inlet must be zero, uniform or parabolic");
       }},
      {"data.peak", [](RunConfig& c, const std::string& v) { c.data.peak = to_double(v); }},
      {"data.fluxes", [](RunConfig& c, const std::string& v) { c.data.fluxes = to_list(v); }},
      {"data.pressure_mean", [](RunConfig& c, const std::string& v) { c.data.pressure_mean = to_double(v); }},
      {"solver.eps", [](RunConfig& c, const std::string& v) { c.solver.ladder = to_list(v); }},
      {"solver.grad_tol", [](RunConfig& c, const std::string& v) { c.solver.grad_tol = to_double(v); }},
      {"solver.max_iter", [](RunConfig& c, const std::string& v) { c.solver.max_iter = static_cast<int>(to_long(v)); }},
      {"solver.memory", [](RunConfig& c, const std::string& v) { c.solver.memory = static_cast<int>(to_long(v)); }},
      {"solver.kappa", [](RunConfig& c, const std::string& v) { c.solver.kappa = to_double(v); }},
      {"solver.ht", [](RunConfig& c, const std::string& v) { c.solver.ht = to_double(v); }},
      {"solver.t_obs", [](RunConfig& c, const std::string& v) { c.solver.t_obs = to_double(v); }},
      {"solver.seed", [](RunConfig& c, const std::string& v) { c.solver.seed = static_cast<unsigned>(to_long(v)); }},
      {"solver.convection",
       [](RunConfig& c, const std::string& v) {
         if (v == "rotational")
           c.solver.convection = Convection::rotational;
         else if (v == "standard")
           c.solver.convection = Convection::standard;
         else
           throw std::invalid_argument("convection must be rotational or standard");
       }},
      {"solver.reference", [](RunConfig& c, const std::string& v) { c.solver.reference = to_bool(v); }},
      {"output.dir", [](RunConfig& c, const std::string& v) { c.output.dir = v; }},
      {"output.vtk", [](RunConfig& c, const std::string& v) { c.output.vtk = to_bool(v); }},
  };
  return m;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::vector<std::string> problems;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(no) + ": ";
    if (eq == std::string::npos) {
      problems.push_back(where + "expected 'section.key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      problems.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (seen.count(key)) problems.push_back(where + "duplicate key '" + key + "' (first on line " +
                                            std::to_string(seen[key]) + ")");
    seen[key] = no;
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      problems.push_back(where + key + ": " + e.what());
    }
  }
  if (problems.empty()) problems = validate_config(cfg);
  if (!problems.empty()) throw ConfigError(problems);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError({"cannot open config file '" + path + "'"});
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> problems;
  const auto& g = cfg.geometry;
  if (g.nx < 2 || g.ny < 2) problems.push_back("geometry: nx and ny must be at least 2");
  if (g.layout == OutletLayout::two_outlets && g.ny < 3) problems.push_back("geometry: two outlets need ny >= 3");
  if (!(g.length > 0.0) || !(g.height > 0.0)) problems.push_back("geometry: length and height must be positive");

  ConstitutiveParams p = cfg.physics.params;
  for (double e : cfg.solver.ladder) {
    p.eps = e;
    const ValidationReport rep = validate_params(p);
    for (const auto& m : rep.errors) problems.push_back("physics: " + m);
    if (rep.fatal) break;
  }

  const int outlets = g.layout == OutletLayout::two_outlets ? 2 : 1;
  if (!cfg.data.fluxes.empty() && static_cast<int>(cfg.data.fluxes.size()) != outlets)
    problems.push_back("data: fluxes needs " + std::to_string(outlets) + " entries");

  const auto& s = cfg.solver;
  if (s.ladder.empty()) problems.push_back("solver: eps ladder is empty");
  for (std::size_t i = 0; i < s.ladder.size(); ++i) {
    if (!(s.ladder[i] > 0.0)) problems.push_back("solver: eps entries must be positive");
    if (i > 0 && !(s.ladder[i] < s.ladder[i - 1])) problems.push_back("solver: eps ladder must be strictly decreasing");
  }
  if (!(s.grad_tol > 0.0)) problems.push_back("solver: grad_tol must be positive");
  if (s.max_iter < 1) problems.push_back("solver: max_iter must be positive");
  if (s.memory < 1) problems.push_back("solver: memory must be positive");
  if (!(s.kappa >= 0.0)) problems.push_back("solver: kappa must be nonnegative");
  if (!(s.t_obs > 0.0)) problems.push_back("solver: t_obs must be positive");
  if (s.ht < 0.0) problems.push_back("solver: ht must be nonnegative");
  if (!s.ladder.empty() && s.ht > 0.0) {
    double emin = s.ladder.front();
    for (double e : s.ladder) emin = std::min(emin, e);
    if (s.ht > 0.25 * emin * (1.0 + 1e-12)) problems.push_back("solver: ht must not exceed min(eps)/4");
  }
  if (cfg.output.dir.empty()) problems.push_back("output: dir must not be empty");
  return problems;
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream os;
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ", ") + num(x);
    return s;
  };
  const auto& p = c.physics.params;
  os << "geometry.nx = " << c.geometry.nx << '\n'
     << "geometry.ny = " << c.geometry.ny << '\n'
     << "geometry.length = " << num(c.geometry.length) << '\n'
     << "geometry.height = " << num(c.geometry.height) << '\n'
     << "geometry.layout = " << (c.geometry.layout == OutletLayout::single ? "single" : "two_outlets") << '\n'
     << "physics.r = " << num(p.r) << '\n'
     << "physics.q = " << num(p.q) << '\n'
     << "physics.sigma2 = " << num(p.sigma2) << '\n'
     << "physics.sigma_r = " << num(p.sigma_r) << '\n'
     << "physics.sigma4 = " << num(p.sigma4) << '\n'
     << "physics.sigma_q = " << num(p.sigma_q) << '\n'
     << "physics.rho2 = " << num(p.rho2) << '\n'
     << "physics.rho_r = " << num(p.rho_r) << '\n'
     << "physics.rho4 = " << num(p.rho4) << '\n'
     << "physics.rho_q = " << num(p.rho_q) << '\n'
     << "physics.fx = " << num(c.physics.fx) << '\n'
     << "physics.fy = " << num(c.physics.fy) << '\n';
  const char* inlet = c.data.inlet == InletProfile::Kind::zero      ? "zero"
                      : c.data.inlet == InletProfile::Kind::uniform ? "uniform"
                                                                    : "parabolic";
  os << "data.inlet = " << inlet << '\n' << "data.peak = " << num(c.data.peak) << '\n';
  if (!c.data.fluxes.empty()) os << "data.fluxes = " << list(c.data.fluxes) << '\n';
  os << "data.pressure_mean = " << num(c.data.pressure_mean) << '\n'
     << "solver.eps = " << list(c.solver.ladder) << '\n'
     << "solver.grad_tol = " << num(c.solver.grad_tol) << '\n'
     << "solver.max_iter = " << c.solver.max_iter << '\n'
     << "solver.memory = " << c.solver.memory << '\n'
     << "solver.kappa = " << num(c.solver.kappa) << '\n'
     << "solver.ht = " << num(c.solver.ht) << '\n'
     << "solver.t_obs = " << num(c.solver.t_obs) << '\n'
     << "solver.seed = " << c.solver.seed << '\n'
     << "solver.convection = " << (c.solver.convection == Convection::rotational ? "rotational" : "standard") << '\n'
     << "solver.reference = " << (c.solver.reference ? "true" : "false") << '\n'
     << "output.dir = " << c.output.dir << '\n'
     << "output.vtk = " << (c.output.vtk ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace wide
