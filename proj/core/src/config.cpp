#include "cosserat/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "cosserat/errors.hpp"

namespace cosserat {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

double parse_number(const std::string& raw, const std::string& key, const std::string& origin) {
  std::istringstream in(raw);
  double x = 0.0;
  std::string rest;
  if (!(in >> x) || (in >> rest))
    throw ParseError(origin + ": value of '" + key + "' is not a number: '" + raw + "'");
  return x;
}

std::vector<double> parse_number_list(const std::string& raw, const std::string& key,
                                      const std::string& origin, std::size_t count) {
  std::istringstream in(raw);
  std::vector<double> out;
  double x;
  while (in >> x) out.push_back(x);
  std::string rest;
  if (in.fail() && !in.eof() && (in.clear(), in >> rest))
    throw ParseError(origin + ": value of '" + key + "' is not a number list: '" + raw + "'");
  if (out.size() != count)
    throw ParseError(origin + ": '" + key + "' needs " + std::to_string(count) + " numbers, got " +
                     std::to_string(out.size()));
  return out;
}

BoundaryCondition parse_boundary(const std::string& word, const std::string& key,
                                 const std::string& origin) {
  if (word == "clamped") return BoundaryCondition::clamped;
  if (word == "free") return BoundaryCondition::free_end;
  throw ValidationError(origin + ": '" + key + "' must be 'clamped' or 'free', got '" + word +
                        "'");
}

void require_positive(double x, const std::string& key, const std::string& origin) {
  if (!(x > 0.0)) throw ValidationError(origin + ": '" + key + "' must be > 0");
}

// Shared rod-parameter keys used by both the simulation and bench parsers.
RodParameters parse_rod(ConfigMap& map, const std::string& origin) {
  RodParameters rod;
  rod.n_nodes = map.get_size("nodes", 50);
  rod.length = map.get_double("length", 1.0);
  rod.rho = map.get_double("density", 1.0);
  rod.area = map.get_double("area", 1.0);
  rod.inertia = map.get_vec3("inertia", Vec3::Ones());
  rod.stiffness_bend = map.get_vec3("stiffness_bend", Vec3::Ones());
  rod.stiffness_shear = map.get_vec3("stiffness_shear", Vec3::Ones());
  rod.kappa_ref = map.get_vec3("kappa_ref", Vec3::Zero());
  rod.nu_ref = map.get_vec3("nu_ref", Vec3(0.0, 0.0, 1.0));
  rod.base = parse_boundary(map.get_string("base_boundary", "clamped"), "base_boundary", origin);
  rod.tip = parse_boundary(map.get_string("tip_boundary", "free"), "tip_boundary", origin);
  if (rod.n_nodes < 2) throw ValidationError(origin + ": 'nodes' must be >= 2");
  require_positive(rod.length, "length", origin);
  require_positive(rod.rho, "density", origin);
  require_positive(rod.area, "area", origin);
  for (int c = 0; c < 3; ++c) {
    if (!(rod.inertia[c] > 0.0)) throw ValidationError(origin + ": 'inertia' must be > 0");
    if (!(rod.stiffness_bend[c] > 0.0))
      throw ValidationError(origin + ": 'stiffness_bend' must be > 0");
    if (!(rod.stiffness_shear[c] > 0.0))
      throw ValidationError(origin + ": 'stiffness_shear' must be > 0");
  }
  return rod;
}

}  // namespace

ConfigMap ConfigMap::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), path);
}

ConfigMap ConfigMap::from_string(const std::string& text, const std::string& origin) {
  ConfigMap map;
  map.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key))
      throw ParseError(origin + ":" + std::to_string(lineno) + ": bad key '" + key + "'");
    if (value.empty())
      throw ParseError(origin + ":" + std::to_string(lineno) + ": empty value for '" + key + "'");
    if (!map.entries_.emplace(key, Entry{value, false}).second)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return map;
}

ConfigMap::Entry* ConfigMap::find(const std::string& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  it->second.consumed = true;
  return &it->second;
}

bool ConfigMap::has(const std::string& key) const { return entries_.count(key) != 0; }

double ConfigMap::get_double(const std::string& key, double fallback) {
  Entry* e = find(key);
  return e ? parse_number(e->value, key, origin_) : fallback;
}

std::size_t ConfigMap::get_size(const std::string& key, std::size_t fallback) {
  Entry* e = find(key);
  if (!e) return fallback;
  const double x = parse_number(e->value, key, origin_);
  if (x < 0.0 || x != static_cast<double>(static_cast<std::size_t>(x)))
    throw ValidationError(origin_ + ": '" + key + "' must be a non-negative integer");
  return static_cast<std::size_t>(x);
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) {
  Entry* e = find(key);
  return e ? e->value : fallback;
}

Vec3 ConfigMap::get_vec3(const std::string& key, const Vec3& fallback) {
  Entry* e = find(key);
  if (!e) return fallback;
  const std::vector<double> xs = parse_number_list(e->value, key, origin_, 3);
  return Vec3(xs[0], xs[1], xs[2]);
}

std::vector<double> ConfigMap::get_numbers(const std::string& key, std::size_t count) {
  Entry* e = find(key);
  if (!e) throw ValidationError(origin_ + ": missing required key '" + key + "'");
  return parse_number_list(e->value, key, origin_, count);
}

void ConfigMap::reject_unknown() const {
  std::string unknown;
  for (const auto& [key, entry] : entries_)
    if (!entry.consumed) unknown += (unknown.empty() ? "" : ", ") + key;
  if (!unknown.empty()) throw ValidationError(origin_ + ": unknown keys: " + unknown);
}

SimulationRunConfig parse_simulation_config(ConfigMap& map) {
  const std::string& origin = map.origin();
  SimulationRunConfig cfg;
  cfg.swimmer.rod = parse_rod(map, origin);
  cfg.swimmer.fluid.mu = map.get_double("mu", 1.0);
  cfg.swimmer.fluid.epsilon = map.get_double("epsilon", 0.1);
  cfg.swimmer.head_epsilon = map.get_double("head_epsilon", 0.0);
  cfg.swimmer.motor_torque = map.get_double("motor_torque", 0.0);
  cfg.swimmer.chemotaxis_gain = map.get_double("chemotaxis_gain", 0.0);
  cfg.swimmer.gradient = map.get_vec3("gradient", Vec3::Zero());
  const std::string mode = map.get_string("coupling", "overdamped");
  if (mode == "overdamped")
    cfg.swimmer.mode = CouplingMode::overdamped;
  else if (mode == "inertial")
    cfg.swimmer.mode = CouplingMode::inertial;
  else
    throw ValidationError(origin + ": 'coupling' must be 'overdamped' or 'inertial'");
  cfg.dt = map.get_double("dt", 1e-4);
  cfg.steps = map.get_size("steps", 1000);
  cfg.stride = map.get_size("stride", 1);
  cfg.plot_plane = map.get_string("plot_plane", "xz");
  if (cfg.plot_plane != "xy" && cfg.plot_plane != "xz" && cfg.plot_plane != "yz")
    throw ValidationError(origin + ": 'plot_plane' must be one of xy, xz, yz");
  require_positive(cfg.swimmer.fluid.mu, "mu", origin);
  require_positive(cfg.swimmer.fluid.epsilon, "epsilon", origin);
  if (cfg.swimmer.head_epsilon < 0.0)
    throw ValidationError(origin + ": 'head_epsilon' must be >= 0");
  require_positive(cfg.dt, "dt", origin);
  if (cfg.steps == 0) throw ValidationError(origin + ": 'steps' must be >= 1");
  if (cfg.stride == 0) throw ValidationError(origin + ": 'stride' must be >= 1");
  map.reject_unknown();
  return cfg;
}

StiffnessBenchConfig parse_stiffness_config(ConfigMap& map) {
  const std::string& origin = map.origin();
  StiffnessBenchConfig cfg;
  cfg.rod = parse_rod(map, origin);
  cfg.bend_amplitude = map.get_double("bend_amplitude", 0.1);
  const double mode = map.get_double("bend_mode", 1.0);
  if (mode < 1.0 || mode != static_cast<double>(static_cast<int>(mode)))
    throw ValidationError(origin + ": 'bend_mode' must be a positive integer");
  cfg.bend_mode = static_cast<int>(mode);
  cfg.hf_amplitude = map.get_double("hf_amplitude", 0.0);
  cfg.range.lo = map.get_double("dt_min", 1e-9);
  cfg.range.hi = map.get_double("dt_max", 1e-1);
  cfg.window_steps = map.get_size("window_steps", 1000);
  require_positive(cfg.range.lo, "dt_min", origin);
  if (!(cfg.range.hi > cfg.range.lo))
    throw ValidationError(origin + ": 'dt_max' must exceed 'dt_min'");
  if (cfg.window_steps == 0) throw ValidationError(origin + ": 'window_steps' must be >= 1");
  map.reject_unknown();
  return cfg;
}

StokesProbeConfig parse_stokes_probe_config(ConfigMap& map) {
  const std::string& origin = map.origin();
  StokesProbeConfig cfg;
  cfg.fluid.mu = map.get_double("mu", 1.0);
  cfg.fluid.epsilon = map.get_double("epsilon", 0.1);
  require_positive(cfg.fluid.mu, "mu", origin);
  require_positive(cfg.fluid.epsilon, "epsilon", origin);
  const std::size_t n_forces = map.get_size("forces", 0);
  for (std::size_t k = 0; k < n_forces; ++k) {
    const std::vector<double> xs = map.get_numbers("force_" + std::to_string(k), 6);
    cfg.forces.positions.emplace_back(xs[0], xs[1], xs[2]);
    cfg.forces.forces.emplace_back(xs[3], xs[4], xs[5]);
  }
  const std::size_t n_torques = map.get_size("torques", 0);
  for (std::size_t k = 0; k < n_torques; ++k) {
    const std::vector<double> xs = map.get_numbers("torque_" + std::to_string(k), 6);
    cfg.torques.positions.emplace_back(xs[0], xs[1], xs[2]);
    cfg.torques.torques.emplace_back(xs[3], xs[4], xs[5]);
  }
  if (n_forces == 0 && n_torques == 0)
    throw ValidationError(origin + ": probe needs at least one force or torque source");
  cfg.grid.lo = map.get_vec3("grid_lo", Vec3(-1.0, -1.0, -1.0));
  cfg.grid.hi = map.get_vec3("grid_hi", Vec3(1.0, 1.0, 1.0));
  cfg.grid.n = map.get_size("grid_n", 5);
  cfg.fd_step = map.get_double("fd_step", 1e-4);
  for (int c = 0; c < 3; ++c)
    if (!(cfg.grid.hi[c] > cfg.grid.lo[c]))
      throw ValidationError(origin + ": 'grid_hi' must exceed 'grid_lo' per axis");
  if (cfg.grid.n == 0) throw ValidationError(origin + ": 'grid_n' must be >= 1");
  require_positive(cfg.fd_step, "fd_step", origin);
  map.reject_unknown();
  return cfg;
}

}  // namespace cosserat
