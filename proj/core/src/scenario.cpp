#include "ckdv/scenario.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ckdv/error.hpp"
#include "ckdv/snapshot_io.hpp"

namespace ckdv {

double PaddleProfile::phi1(double x) const { return a / std::cosh(x / l); }

double PaddleProfile::phi2(double z, const Stratification& strat) const {
  const double n = strat.buoyancy_frequency;
  const double s = b * (z - z0);
  return std::sqrt(2.0 / (n * n * strat.depth)) * std::tanh(s) / std::cosh(s);
}

Profile PaddleProfile::vertical(const Stratification& strat) const {
  return [p = *this, strat](double z) { return p.phi2(z, strat); };
}

ScenarioConfig mcewan_default() {
  ScenarioConfig cfg;
  cfg.strat = {1.23, 0.25};
  cfg.modes = {2, 4, 6, 8, 10};
  cfg.paddle = {1e-3, 0.05, 40.0, 0.125};
  cfg.grid = {0.5, 2.0, 1.0 / 1024.0};
  cfg.scheme.scheme = Scheme::two_stage;
  cfg.scheme.dt = 0.0;
  // s/m^4; with dx = 1/1024 this gives tau ~ 1.8e-6 s (about 11000 steps).
  cfg.scheme.margin = 2e6;
  cfg.run.t_end = 0.02;
  cfg.run.snapshot_every = 0;
  cfg.run.z_points = 129;
  cfg.run.run_id = "mcewan";
  return cfg;
}

bool filesystem_safe(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
           ch == '-' || ch == '_' || ch == '.';
  });
}

namespace {

double domain_length(const ScenarioConfig& cfg) {
  return cfg.grid.padding * cfg.grid.tank_length;
}

}  // namespace

std::vector<Violation> validate(const ScenarioConfig& cfg) {
  std::vector<Violation> out;
  auto check = [&](bool ok, const char* field, const char* rule) {
    if (!ok) out.push_back({field, rule});
  };
  const auto& s = cfg.strat;
  check(s.buoyancy_frequency > 0.0 && std::isfinite(s.buoyancy_frequency),
        "stratification.buoyancy_frequency", "must be > 0");
  check(s.depth > 0.0 && std::isfinite(s.depth), "stratification.depth", "must be > 0");

  check(!cfg.modes.empty(), "stratification.modes", "must list at least one mode");
  check(std::all_of(cfg.modes.begin(), cfg.modes.end(), [](int n) { return n >= 1; }),
        "stratification.modes", "mode indices must be >= 1");
  check(std::set<int>(cfg.modes.begin(), cfg.modes.end()).size() == cfg.modes.size(),
        "stratification.modes", "mode indices must be distinct");

  const auto& p = cfg.paddle;
  check(p.a != 0.0 && std::isfinite(p.a), "paddle.a", "must be nonzero");
  check(p.l > 0.0 && std::isfinite(p.l), "paddle.l", "must be > 0");
  check(p.b > 0.0 && std::isfinite(p.b), "paddle.b", "must be > 0");
  check(p.z0 > 0.0 && p.z0 < s.depth, "paddle.z0", "must lie strictly inside (0, depth)");

  const auto& g = cfg.grid;
  check(g.tank_length > 0.0 && std::isfinite(g.tank_length), "grid.tank_length",
        "must be > 0");
  check(g.padding >= 1.0 && std::isfinite(g.padding), "grid.padding", "must be >= 1");
  check(g.dx > 0.0 && std::isfinite(g.dx), "grid.dx", "must be > 0");
  if (g.dx > 0.0 && p.l > 0.0) {
    check(p.l >= 10.0 * g.dx, "paddle.l", "pulse width must be resolved: l >= 10 dx");
  }
  if (g.dx > 0.0 && g.tank_length > 0.0 && g.padding >= 1.0) {
    check(domain_length(cfg) / g.dx >= 8.0, "grid.dx", "domain must hold >= 8 points");
  }
  if (p.l > 0.0 && g.tank_length > 0.0) {
    check(domain_length(cfg) >= 8.0 * p.l, "grid.padding",
          "periodic domain must be >= 8 pulse widths");
  }

  const auto& sc = cfg.scheme;
  check(sc.dt >= 0.0 && std::isfinite(sc.dt), "scheme.dt", "must be >= 0 (0 = automatic)");
  check(sc.margin > 0.0 && std::isfinite(sc.margin), "scheme.margin", "must be > 0");
  check(std::isfinite(sc.sigma), "scheme.sigma", "must be finite");
  check(std::isfinite(sc.beta2), "scheme.beta2", "must be finite");

  const auto& r = cfg.run;
  check(r.t_end >= 0.0 && std::isfinite(r.t_end), "run.t_end", "must be >= 0");
  check(r.z_points >= 2, "run.z_points", "must be >= 2");
  check(filesystem_safe(r.run_id), "run.run_id",
        "must be non-empty and use only letters, digits, '-', '_' and '.'");
  return out;
}

void require_valid(const ScenarioConfig& cfg) {
  const auto violations = validate(cfg);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid configuration:";
  for (const auto& v : violations) msg << "\n  " << v.field << ": " << v.rule;
  throw ConfigError(msg.str());
}

Grid make_grid(const ScenarioConfig& cfg) {
  require_valid(cfg);
  const double length = domain_length(cfg);
  const auto n = static_cast<std::size_t>(std::ceil(length / cfg.grid.dx * (1.0 - 1e-12)));
  return Grid::covering(-0.5 * length, length, n);
}

ModeBasis make_basis(const ScenarioConfig& cfg) {
  require_valid(cfg);
  return build_constant_n_basis(cfg.strat, cfg.modes);
}

CoefficientSet make_coefficients(const ScenarioConfig& cfg, const ModeBasis& basis) {
  return build_coefficients(basis, cfg.scheme.sigma, cfg.scheme.beta2);
}

SchemeParams make_scheme_params(const ScenarioConfig& cfg, const Grid& grid,
                                const CoefficientSet& coeffs) {
  SchemeParams params;
  params.scheme = cfg.scheme.scheme;
  params.margin = cfg.scheme.margin;
  params.full_step_dispersion = cfg.scheme.full_step_dispersion;
  params.tau = cfg.scheme.dt > 0.0 ? cfg.scheme.dt : suggest_timestep(grid, coeffs, params);
  return params;
}

InitialState build_initial_state(const ScenarioConfig& cfg, const ModeBasis& basis,
                                 const Grid& grid) {
  require_valid(cfg);
  if (basis.indices() != cfg.modes || !(basis.stratification() == cfg.strat)) {
    throw ConfigError("initial state: basis does not match the configuration");
  }
  if (cfg.paddle.l < 10.0 * grid.dx) {
    throw ConfigError("initial state: grid under-resolves the pulse (l < 10 dx)");
  }
  InitialState out;
  const Profile phi2 = cfg.paddle.vertical(cfg.strat);
  out.projection = project_profile(phi2, basis);
  for (double c : out.projection.coefficients) {
    out.energy_fraction.push_back(c * c / out.projection.profile_energy);
  }

  const int nz = cfg.run.z_points;
  const double h = cfg.strat.depth;
  for (int q = 0; q < nz; ++q) {
    const double z = h * q / (nz - 1);
    const double r =
        std::abs(phi2(z) - synthesize_profile(basis, out.projection.coefficients, z));
    out.max_profile_residual = std::max(out.max_profile_residual, r);
  }
  out.max_field_residual = std::abs(cfg.paddle.a) * out.max_profile_residual;

  out.state = ModeState(cfg.modes, grid.n_points, 0.0);
  for (std::size_t s = 0; s < basis.size(); ++s) {
    auto theta = out.state.mode(s);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
      theta[i] = out.projection.coefficients[s] * cfg.paddle.phi1(grid.x(i));
    }
  }
  return out;
}

std::vector<int> parse_mode_list(const std::string& text) {
  std::vector<int> modes;
  std::string token;
  std::istringstream ss(text);
  while (std::getline(ss, token, ',')) {
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("empty entry in mode list '" + text + "'");
    token = token.substr(first, last - first + 1);
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw ConfigError("bad mode index '" + token + "'");
    modes.push_back(n);
  }
  if (modes.empty()) throw ConfigError("empty mode list");
  return modes;
}

std::string format_mode_list(const std::vector<int>& modes) {
  std::string out;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(modes[i]);
  }
  return out;
}

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"stratification", {"buoyancy_frequency", "depth", "modes"}},
      {"paddle", {"a", "l", "b", "z0"}},
      {"grid", {"tank_length", "padding", "dx"}},
      {"scheme", {"name", "dt", "margin", "full_step_dispersion", "sigma", "beta2"}},
      {"run", {"t_end", "snapshot_every", "z_points", "run_id"}},
  };
  return s;
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

}  // namespace

ScenarioConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ScenarioConfig cfg = mcewan_default();
  for (const auto& [section, body] : tree) {
    const auto known = schema().find(section);
    if (known == schema().end()) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, node] : body) {
      if (!known->second.count(key)) {
        throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
      }
      const std::string full = section + "." + key;
      const std::string v = node.get_value<std::string>();
      if (full == "stratification.buoyancy_frequency") cfg.strat.buoyancy_frequency = to_double(full, v);
      else if (full == "stratification.depth") cfg.strat.depth = to_double(full, v);
      else if (full == "stratification.modes") cfg.modes = parse_mode_list(v);
      else if (full == "paddle.a") cfg.paddle.a = to_double(full, v);
      else if (full == "paddle.l") cfg.paddle.l = to_double(full, v);
      else if (full == "paddle.b") cfg.paddle.b = to_double(full, v);
      else if (full == "paddle.z0") cfg.paddle.z0 = to_double(full, v);
      else if (full == "grid.tank_length") cfg.grid.tank_length = to_double(full, v);
      else if (full == "grid.padding") cfg.grid.padding = to_double(full, v);
      else if (full == "grid.dx") cfg.grid.dx = to_double(full, v);
      else if (full == "scheme.name") cfg.scheme.scheme = scheme_from_string(v);
      else if (full == "scheme.dt") cfg.scheme.dt = to_double(full, v);
      else if (full == "scheme.margin") cfg.scheme.margin = to_double(full, v);
      else if (full == "scheme.full_step_dispersion")
        cfg.scheme.full_step_dispersion = full_step_dispersion_from_string(v);
      else if (full == "scheme.sigma") cfg.scheme.sigma = to_double(full, v);
      else if (full == "scheme.beta2") cfg.scheme.beta2 = to_double(full, v);
      else if (full == "run.t_end") cfg.run.t_end = to_double(full, v);
      else if (full == "run.snapshot_every") {
        const long long n = to_integer(full, v);
        if (n < 0) throw ConfigError("config: run.snapshot_every must be >= 0");
        cfg.run.snapshot_every = static_cast<std::size_t>(n);
      } else if (full == "run.z_points") cfg.run.z_points = static_cast<int>(to_integer(full, v));
      else if (full == "run.run_id") cfg.run.run_id = v;
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(is);
}

void write_config(std::ostream& os, const ScenarioConfig& cfg) {
  os << "[stratification]\n"
     << "buoyancy_frequency = " << format_number(cfg.strat.buoyancy_frequency) << '\n'
     << "depth = " << format_number(cfg.strat.depth) << '\n'
     << "modes = " << format_mode_list(cfg.modes) << "\n\n"
     << "[paddle]\n"
     << "a = " << format_number(cfg.paddle.a) << '\n'
     << "l = " << format_number(cfg.paddle.l) << '\n'
     << "b = " << format_number(cfg.paddle.b) << '\n'
     << "z0 = " << format_number(cfg.paddle.z0) << "\n\n"
     << "[grid]\n"
     << "tank_length = " << format_number(cfg.grid.tank_length) << '\n'
     << "padding = " << format_number(cfg.grid.padding) << '\n'
     << "dx = " << format_number(cfg.grid.dx) << "\n\n"
     << "[scheme]\n"
     << "name = " << to_string(cfg.scheme.scheme) << '\n'
     << "dt = " << format_number(cfg.scheme.dt) << '\n'
     << "margin = " << format_number(cfg.scheme.margin) << '\n'
     << "full_step_dispersion = " << to_string(cfg.scheme.full_step_dispersion) << '\n'
     << "sigma = " << format_number(cfg.scheme.sigma) << '\n'
     << "beta2 = " << format_number(cfg.scheme.beta2) << "\n\n"
     << "[run]\n"
     << "t_end = " << format_number(cfg.run.t_end) << '\n'
     << "snapshot_every = " << cfg.run.snapshot_every << '\n'
     << "z_points = " << cfg.run.z_points << '\n'
     << "run_id = " << cfg.run.run_id << '\n';
}

std::string config_to_string(const ScenarioConfig& cfg) {
  std::ostringstream os;
  write_config(os, cfg);
  return os.str();
}

}  // namespace ckdv
