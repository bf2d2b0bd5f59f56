#include "fmcwsim/config_node.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fmcwsim/errors.hpp"

namespace fmcwsim {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

ConfigNode::ConfigNode(const nlohmann::json& value, std::string path) : value_(value), path_(std::move(path)) {
  if (!value_.is_object()) throw ConfigError(path_, "expected an object");
}

std::string ConfigNode::key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

bool ConfigNode::has(const std::string& key) const { return value_.contains(key) && !value_.at(key).is_null(); }

void ConfigNode::fail(const std::string& key, const std::string& message) const {
  throw ConfigError(key_path(key), message);
}

const nlohmann::json& ConfigNode::require(const std::string& key) {
  seen_.insert(key);
  if (!has(key)) fail(key, "missing required key");
  return value_.at(key);
}

const nlohmann::json& ConfigNode::raw(const std::string& key) { return require(key); }

double ConfigNode::number(const std::string& key) {
  const auto& v = require(key);
  if (!v.is_number()) fail(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite");
  return x;
}

double ConfigNode::number(const std::string& key, double fallback) {
  seen_.insert(key);
  return has(key) ? number(key) : fallback;
}

std::optional<double> ConfigNode::optional_number(const std::string& key) {
  seen_.insert(key);
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::uint32_t ConfigNode::count(const std::string& key, std::uint32_t fallback, std::uint32_t min_value) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const auto& v = value_.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() > 0xFFFFFFFFll) {
    fail(key, "expected a non-negative integer");
  }
  const auto x = v.get<std::uint32_t>();
  if (x < min_value) fail(key, "must be >= " + std::to_string(min_value));
  return x;
}

std::uint64_t ConfigNode::unsigned64(const std::string& key, std::uint64_t fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const auto& v = value_.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    fail(key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool ConfigNode::flag(const std::string& key, bool fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const auto& v = value_.at(key);
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

std::string ConfigNode::text(const std::string& key) {
  const auto& v = require(key);
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

std::string ConfigNode::text(const std::string& key, const std::string& fallback) {
  seen_.insert(key);
  return has(key) ? text(key) : fallback;
}

Vec3 ConfigNode::vec3(const std::string& key) {
  const auto& v = require(key);
  if (!v.is_array() || v.size() != 3) fail(key, "expected an array of 3 numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) fail(key, "expected an array of 3 numbers");
    out[i] = v[i].get<double>();
  }
  if (!out.allFinite()) fail(key, "must be finite");
  return out;
}

Vec3 ConfigNode::vec3(const std::string& key, const Vec3& fallback) {
  seen_.insert(key);
  return has(key) ? vec3(key) : fallback;
}

ConfigNode ConfigNode::child(const std::string& key) {
  const auto& v = require(key);
  if (!v.is_object()) fail(key, "expected an object");
  return ConfigNode(v, key_path(key));
}

std::vector<ConfigNode> ConfigNode::children(const std::string& key) {
  const auto& v = require(key);
  if (!v.is_array()) fail(key, "expected an array");
  std::vector<ConfigNode> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string item_path = key_path(key) + "[" + std::to_string(i) + "]";
    if (!v[i].is_object()) throw ConfigError(item_path, "expected an object");
    out.emplace_back(v[i], item_path);
  }
  return out;
}

void ConfigNode::finish() const {
  for (const auto& [key, unused] : value_.items()) {
    if (!seen_.count(key)) throw ConfigError(key_path(key), "unknown key");
  }
}

nlohmann::json parse_json_text(const std::string& text, const std::string& source_name) {
  try {
    return nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    // Locate the byte offset as line:column for the message.
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("", source_name + ":" + std::to_string(line) + ":" + std::to_string(column) +
                              ": JSON syntax error");
  }
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path.string());
}

namespace {

double fov_degrees(ConfigNode& node, const std::string& key, double fallback_rad) {
  const double deg = node.number(key, fallback_rad / kDegToRad);
  if (!(deg > 0.0 && deg < 180.0)) node.fail(key, "must lie in (0, 180) degrees, got " + std::to_string(deg));
  return deg * kDegToRad;
}

double positive(ConfigNode& node, const std::string& key, std::optional<double> fallback = std::nullopt) {
  const double x = fallback ? node.number(key, *fallback) : node.number(key);
  if (!(x > 0.0)) node.fail(key, "must be > 0");
  return x;
}

Vec3 unit_vector(ConfigNode& node, const std::string& key, const Vec3& fallback) {
  const Vec3 v = node.vec3(key, fallback);
  if (std::abs(v.norm() - 1.0) > 1e-9) node.fail(key, "must be a unit vector");
  return v;
}

SensorPose parse_sensor(ConfigNode node) {
  SensorPose s;
  s.position = node.vec3("position");
  s.boresight = unit_vector(node, "boresight", s.boresight);
  s.up = unit_vector(node, "up", s.up);
  if (std::abs(s.boresight.dot(s.up)) > 1e-9) node.fail("up", "must be orthogonal to boresight");
  s.fov_az = fov_degrees(node, "fov_az_deg", s.fov_az);
  s.fov_el = fov_degrees(node, "fov_el_deg", s.fov_el);
  node.finish();
  return s;
}

Geometry parse_geometry(ConfigNode node) {
  const std::string kind = node.text("kind");
  Geometry geometry;
  if (kind == "sphere") {
    geometry = Sphere{positive(node, "radius")};
  } else if (kind == "capsule") {
    geometry = Capsule{node.vec3("a"), node.vec3("b"), positive(node, "radius")};
  } else if (kind == "mesh") {
    TriangleMesh mesh;
    const auto& vertices = node.raw("vertices");
    const auto& triangles = node.raw("triangles");
    if (!vertices.is_array() || !triangles.is_array() || triangles.empty()) {
      node.fail("triangles", "mesh needs vertex and triangle arrays with at least one triangle");
    }
    for (const auto& v : vertices) {
      if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
        node.fail("vertices", "each vertex is [x, y, z]");
      }
      mesh.vertices.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
    }
    for (const auto& t : triangles) {
      if (!t.is_array() || t.size() != 3) node.fail("triangles", "each triangle is [i, j, k]");
      std::array<std::uint32_t, 3> tri{};
      for (int i = 0; i < 3; ++i) {
        if (!t[i].is_number_unsigned() || t[i].get<std::uint64_t>() >= mesh.vertices.size()) {
          node.fail("triangles", "vertex index out of range");
        }
        tri[i] = t[i].get<std::uint32_t>();
      }
      mesh.triangles.push_back(tri);
    }
    geometry = std::move(mesh);
  } else {
    node.fail("kind", "unknown geometry kind '" + kind + "' (sphere, capsule, mesh)");
  }
  node.finish();
  return geometry;
}

Trajectory parse_trajectory(ConfigNode node) {
  const std::string kind = node.text("kind");
  Trajectory trajectory;
  if (kind == "static") {
    trajectory = StaticPath{node.vec3("position")};
  } else if (kind == "linear") {
    trajectory = LinearPath{node.vec3("start"), node.vec3("velocity")};
  } else if (kind == "circular") {
    CircularPath c;
    c.center = node.vec3("center");
    c.radius = positive(node, "radius");
    c.period = node.number("period");
    if (c.period == 0.0) node.fail("period", "must be non-zero");
    c.phase = node.number("phase_deg", 0.0) * kDegToRad;
    c.normal = unit_vector(node, "normal", Vec3::UnitZ());
    if (node.has("swing")) {
      ConfigNode swing = node.child("swing");
      c.swing.amplitude = swing.number("amplitude", 0.0);
      c.swing.frequency = swing.number("frequency", 0.0);
      c.swing.phase = swing.number("phase_deg", 0.0) * kDegToRad;
      swing.finish();
    }
    trajectory = c;
  } else if (kind == "keyframed") {
    KeyframedPath path;
    for (ConfigNode key : node.children("keys")) {
      path.keys.push_back({key.number("time"), key.vec3("position")});
      key.finish();
    }
    if (path.keys.size() < 2) node.fail("keys", "needs at least 2 keyframes");
    for (std::size_t i = 1; i < path.keys.size(); ++i) {
      if (!(path.keys[i].time > path.keys[i - 1].time)) node.fail("keys", "times must be strictly increasing");
    }
    trajectory = std::move(path);
  } else {
    node.fail("kind", "unknown trajectory kind '" + kind + "' (static, linear, circular, keyframed)");
  }
  node.finish();
  return trajectory;
}

Target parse_target(ConfigNode node) {
  Target t;
  t.id = node.text("id");
  if (t.id.empty()) node.fail("id", "must not be empty");
  t.reflectivity = node.number("reflectivity", 1.0);
  if (!(t.reflectivity >= 0.0)) node.fail("reflectivity", "must be >= 0");
  t.geometry = parse_geometry(node.child("geometry"));
  t.trajectory = parse_trajectory(node.child("trajectory"));
  node.finish();
  return t;
}

Scene parse_walker(ConfigNode node) {
  WalkerParams p;
  p.radius = positive(node, "radius", p.radius);
  p.period = node.number("period", p.period);
  if (p.period == 0.0) node.fail("period", "must be non-zero");
  p.phase = node.number("phase_deg", 0.0) * kDegToRad;
  p.center = node.vec3("center", p.center);
  p.sensor_distance = positive(node, "sensor_distance", p.sensor_distance);
  if (!(p.sensor_distance > p.radius)) node.fail("sensor_distance", "must exceed the circle radius");
  p.fov_az = fov_degrees(node, "fov_az_deg", p.fov_az);
  p.fov_el = fov_degrees(node, "fov_el_deg", p.fov_el);
  p.reflectivity = node.number("reflectivity", p.reflectivity);
  if (!(p.reflectivity >= 0.0)) node.fail("reflectivity", "must be >= 0");
  p.swing_amplitude = node.number("swing_amplitude", p.swing_amplitude);
  p.swing_frequency = node.number("swing_frequency", p.swing_frequency);
  p.frame_rate = positive(node, "frame_rate", p.frame_rate);
  p.frame_count = node.count("frame_count", p.frame_count, 1);
  node.finish();
  return make_walker_scene(p);
}

}  // namespace

Scene parse_scene(const nlohmann::json& document, const std::string& path) {
  ConfigNode root(document, path);
  try {
    if (root.has("preset")) {
      const std::string preset = root.text("preset");
      if (preset != "walker") root.fail("preset", "unknown preset '" + preset + "' (walker)");
      const nlohmann::json defaults = nlohmann::json::object();
      Scene scene = root.has("walker") ? parse_walker(root.child("walker"))
                                       : parse_walker(ConfigNode(defaults, root.key_path("walker")));
      root.finish();
      return scene;
    }
    const SensorPose sensor = parse_sensor(root.child("sensor"));
    const double frame_rate = positive(root, "frame_rate");
    if (!root.has("frame_count")) root.fail("frame_count", "missing required key");
    const std::uint32_t frame_count = root.count("frame_count", 0, 1);
    std::vector<Target> targets;
    if (root.has("targets")) {
      for (ConfigNode node : root.children("targets")) targets.push_back(parse_target(node));
    }
    root.finish();
    return Scene(std::move(targets), sensor, frame_rate, frame_count);
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
}

Scene load_scene(const std::filesystem::path& path) { return parse_scene(load_json_file(path), ""); }

}  // namespace fmcwsim
