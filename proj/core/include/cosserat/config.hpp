#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cosserat/rod.hpp"
#include "cosserat/stokes.hpp"
#include "cosserat/swimmer.hpp"
#include "cosserat/types.hpp"

namespace cosserat {

// Flat `key = value` configuration text: one assignment per line, `#` starts
// a comment, blank lines ignored. Values are scalars, words, or whitespace
// separated number lists. Malformed lines raise ParseError; every key a
// parser does not consume raises ValidationError, so typos never pass
// silently.
class ConfigMap {
 public:
  static ConfigMap from_file(const std::string& path);
  static ConfigMap from_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  double get_double(const std::string& key, double fallback);
  std::size_t get_size(const std::string& key, std::size_t fallback);
  std::string get_string(const std::string& key, const std::string& fallback);
  Vec3 get_vec3(const std::string& key, const Vec3& fallback);
  // Exactly `count` numbers; the key must exist.
  std::vector<double> get_numbers(const std::string& key, std::size_t count);

  // Throws ValidationError naming every key no getter consumed.
  void reject_unknown() const;

  const std::string& origin() const { return origin_; }

 private:
  struct Entry {
    std::string value;
    bool consumed = false;
  };
  std::map<std::string, Entry> entries_;
  std::string origin_;

  Entry* find(const std::string& key);
};

// A swimmer run: rod + fluid + motor plus the time loop controls.
struct SimulationRunConfig {
  SwimmerConfig swimmer;
  double dt = 1e-4;
  std::size_t steps = 1000;
  std::size_t stride = 1;
  std::string plot_plane = "xz";  // projection for the centerline plot
};
SimulationRunConfig parse_simulation_config(ConfigMap& map);

// A largest-stable-step comparison between the two steppers on one scenario.
struct StiffnessBenchConfig {
  RodParameters rod;
  double bend_amplitude = 0.1;
  int bend_mode = 1;
  double hf_amplitude = 0.0;
  DtRange range{1e-9, 1e-1};
  std::size_t window_steps = 1000;
};
StiffnessBenchConfig parse_stiffness_config(ConfigMap& map);

// A field probe: point sources plus the lattice on which divergence and
// extrema are sampled.
struct StokesProbeConfig {
  FluidParams fluid;
  PointForceSet forces;
  PointTorqueSet torques;
  ProbeGrid grid;
  double fd_step = 1e-4;
};
StokesProbeConfig parse_stokes_probe_config(ConfigMap& map);

}  // namespace cosserat
