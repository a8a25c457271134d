#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stablenorm/periodic_space.hpp"

namespace sn {

inline constexpr const char* kToolVersion = "0.3.0";

// Builder description, YAML. Field names:
//   builder: flat | hedlund
//   n: <int>                    rank of the torus
//   resolution: <int>           grid points per axis
//   stencil_radius: <int>       optional (flat 2, hedlund 1)
//   f_far: <real>               hedlund only
//   highways:                   hedlund only, list of
//     - points: [[x, ...], ...] polyline; last - first integral
//       length: <real>          target length L_i
//       radius: <real>          tube radius r_i
// Errors are ParseError with the line of the offending node.
struct BuilderConfig {
  std::string builder;
  int n = 0;
  int resolution = 0;
  int stencil_radius = -1;  // -1: builder default
  HedlundSpec hedlund;
};

BuilderConfig parse_builder_yaml(const std::string& text);
std::string builder_yaml(const BuilderConfig& c);
PeriodicSpace build_from_config(const BuilderConfig& c);

struct RunConfig {
  std::string command;
  std::string space_path;
  std::string spec_path;
  std::string out_dir;
  double tol = 0;  // 0: the command's default
  std::vector<double> horizons;  // empty: default ladder
  uint64_t seed = 1;
  int workers = 1;
  int resolution = 0;
  int depth = 20;
  int radius = 0;       // stable-ball direction radius; 0: by rank
  int iterations = -1;  // selftest; -1 default
  bool inject_broken_hull = false;  // selftest fixture
  void validate() const;  // throws std::invalid_argument
  std::string canonical() const;
  std::string hash() const;  // FNV-1a 64 of canonical(), hex
};

// "# stablenorm <version> config=<hash> seed=<seed> <what>"
std::string output_header(const RunConfig& c, const std::string& what);
// Output directory: flag, else $STABLENORM_OUT, else ".".
std::string default_out_dir(const std::string& flag);

}  // namespace sn
