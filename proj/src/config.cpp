#include "stablenorm/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "stablenorm/space_io.hpp"

namespace sn {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

template <class T>
T scalar(const YAML::Node& n, const char* what) {
  if (!n.IsScalar()) throw ParseError(line_of(n), std::string(what) + ": expected a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError(line_of(n), std::string(what) + ": bad value '" + n.Scalar() + "'");
  }
}

}  // namespace

BuilderConfig parse_builder_yaml(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.mark.line + 1, e.msg);
  }
  if (!root.IsMap()) throw ParseError(1, "expected a mapping at top level");
  BuilderConfig c;
  int builder_line = 1;
  for (auto it = root.begin(); it != root.end(); ++it) {
    std::string key = it->first.as<std::string>();
    const YAML::Node& v = it->second;
    if (key == "builder") {
      c.builder = scalar<std::string>(v, "builder");
      builder_line = line_of(v);
    } else if (key == "n") {
      c.n = scalar<int>(v, "n");
    } else if (key == "resolution") {
      c.resolution = scalar<int>(v, "resolution");
    } else if (key == "stencil_radius") {
      c.stencil_radius = scalar<int>(v, "stencil_radius");
    } else if (key == "f_far") {
      c.hedlund.f_far = scalar<double>(v, "f_far");
    } else if (key == "highways") {
      if (!v.IsSequence()) throw ParseError(line_of(v), "highways: expected a list");
      for (const auto& h : v) {
        if (!h.IsMap()) throw ParseError(line_of(h), "highway: expected a mapping");
        Highway hw;
        bool have_points = false;
        for (auto jt = h.begin(); jt != h.end(); ++jt) {
          std::string hk = jt->first.as<std::string>();
          const YAML::Node& hv = jt->second;
          if (hk == "points") {
            if (!hv.IsSequence() || hv.size() < 2) throw ParseError(line_of(hv), "points: expected at least two points");
            for (const auto& p : hv) {
              if (!p.IsSequence()) throw ParseError(line_of(p), "point: expected a list of coordinates");
              RVec x;
              for (const auto& q : p) x.push_back(scalar<double>(q, "coordinate"));
              hw.points.push_back(x);
            }
            have_points = true;
          } else if (hk == "length") {
            hw.length = scalar<double>(hv, "length");
            if (!(hw.length > 0)) throw ParseError(line_of(hv), "length must be positive");
          } else if (hk == "radius") {
            hw.radius = scalar<double>(hv, "radius");
            if (!(hw.radius > 0)) throw ParseError(line_of(hv), "radius must be positive");
          } else {
            throw ParseError(line_of(jt->first), "unknown highway key '" + hk + "'");
          }
        }
        if (!have_points) throw ParseError(line_of(h), "highway without points");
        c.hedlund.highways.push_back(hw);
      }
    } else {
      throw ParseError(line_of(it->first), "unknown key '" + key + "'");
    }
  }
  if (c.builder != "flat" && c.builder != "hedlund")
    throw ParseError(builder_line, "builder must be 'flat' or 'hedlund'");
  if (c.n < 1) throw ParseError(1, "n must be >= 1");
  c.hedlund.n = c.n;
  if (c.builder == "hedlund") {
    if (c.hedlund.highways.empty()) throw ParseError(1, "hedlund builder needs highways");
    for (const auto& h : c.hedlund.highways)
      for (const auto& p : h.points)
        if ((int)p.size() != c.n) throw ParseError(1, "highway point dimension differs from n");
    if (c.stencil_radius > 0) c.hedlund.stencil_radius = c.stencil_radius;
  }
  return c;
}

std::string builder_yaml(const BuilderConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap << YAML::Key << "builder" << YAML::Value << c.builder << YAML::Key << "n" << YAML::Value << c.n
    << YAML::Key << "resolution" << YAML::Value << c.resolution;
  if (c.stencil_radius > 0) e << YAML::Key << "stencil_radius" << YAML::Value << c.stencil_radius;
  if (c.builder == "hedlund") {
    e << YAML::Key << "f_far" << YAML::Value << c.hedlund.f_far << YAML::Key << "highways" << YAML::Value
      << YAML::BeginSeq;
    for (const auto& h : c.hedlund.highways) {
      e << YAML::BeginMap << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
      for (const auto& p : h.points) e << YAML::Flow << p;
      e << YAML::EndSeq << YAML::Key << "length" << YAML::Value << h.length << YAML::Key << "radius" << YAML::Value
        << h.radius << YAML::EndMap;
    }
    e << YAML::EndSeq;
  }
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

PeriodicSpace build_from_config(const BuilderConfig& c) {
  if (c.resolution < 1) throw std::invalid_argument("resolution must be set");
  if (c.builder == "flat") return build_flat_torus(c.n, c.resolution, c.stencil_radius > 0 ? c.stencil_radius : 2);
  if (c.builder == "hedlund") return build_hedlund_graph(c.hedlund, c.resolution);
  throw std::invalid_argument("unknown builder '" + c.builder + "'");
}

void RunConfig::validate() const {
  if (!(tol >= 0) || !std::isfinite(tol)) throw std::invalid_argument("--tol must be positive");
  if (workers < 1) throw std::invalid_argument("--workers must be >= 1");
  if (depth < 1) throw std::invalid_argument("--depth must be >= 1");
  if (radius < 0) throw std::invalid_argument("--radius must be >= 0");
  if (resolution < 0) throw std::invalid_argument("--resolution must be >= 0");
  for (size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0)) throw std::invalid_argument("horizons must be positive");
    if (i && !(horizons[i] > horizons[i - 1])) throw std::invalid_argument("horizons must increase");
  }
}

std::string RunConfig::canonical() const {
  // workers and out_dir do not affect results and stay out of the hash
  std::ostringstream os;
  os.precision(17);
  os << "command=" << command << ";space=" << space_path << ";spec=" << spec_path << ";tol=" << tol
     << ";seed=" << seed << ";resolution=" << resolution << ";depth=" << depth << ";radius=" << radius << ";iterations=" << iterations << ";broken=" << inject_broken_hull
     << ";horizons=";
  for (double h : horizons) os << h << ',';
  return os.str();
}

std::string RunConfig::hash() const {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

std::string output_header(const RunConfig& c, const std::string& what) {
  return "# stablenorm " + std::string(kToolVersion) + " config=" + c.hash() + " seed=" + std::to_string(c.seed) + " " +
         what + "\n";
}

std::string default_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* e = std::getenv("STABLENORM_OUT"); e && *e) return e;
  return ".";
}

}  // namespace sn
