#include "fmcwsim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "fmcwsim/errors.hpp"

namespace fmcwsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAxisTolerance = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

bool finite(const Vec3& v) { return v.allFinite(); }

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw OutOfRangeError("trajectory time must be finite and >= 0");
}

// Index of the keyframe segment [k, k+1] containing t.
std::size_t segment_of(const KeyframedPath& path, double t) {
  const auto& keys = path.keys;
  if (t < keys.front().time || t > keys.back().time) {
    throw OutOfRangeError("time " + std::to_string(t) + " s outside keyframe span [" +
                          std::to_string(keys.front().time) + ", " + std::to_string(keys.back().time) + "]");
  }
  auto it = std::upper_bound(keys.begin(), keys.end(), t,
                             [](double value, const Keyframe& k) { return value < k.time; });
  auto index = static_cast<std::size_t>(std::distance(keys.begin(), it));
  return std::min(index == 0 ? 0 : index - 1, keys.size() - 2);
}

}  // namespace

void validate(const SensorPose& sensor) {
  require(finite(sensor.position), "sensor position must be finite");
  require(std::abs(sensor.boresight.norm() - 1.0) <= kAxisTolerance, "sensor boresight must be unit-norm");
  require(std::abs(sensor.up.norm() - 1.0) <= kAxisTolerance, "sensor up must be unit-norm");
  require(std::abs(sensor.boresight.dot(sensor.up)) <= kAxisTolerance, "sensor boresight and up must be orthogonal");
  require(sensor.fov_az > 0.0 && sensor.fov_az < std::numbers::pi, "sensor fov_az must lie in (0, pi)");
  require(sensor.fov_el > 0.0 && sensor.fov_el < std::numbers::pi, "sensor fov_el must lie in (0, pi)");
}

void validate(const Trajectory& trajectory) {
  std::visit(Overloaded{
                 [](const StaticPath& p) { require(finite(p.position), "static position must be finite"); },
                 [](const LinearPath& p) {
                   require(finite(p.start) && finite(p.velocity), "linear path must be finite");
                 },
                 [](const CircularPath& p) {
                   require(finite(p.center), "circle center must be finite");
                   require(p.radius > 0.0 && std::isfinite(p.radius), "circle radius must be > 0");
                   require(p.period != 0.0 && std::isfinite(p.period), "circle period must be non-zero");
                   require(std::isfinite(p.phase), "circle phase must be finite");
                   require(std::abs(p.normal.norm() - 1.0) <= kAxisTolerance, "circle normal must be unit-norm");
                   require(std::isfinite(p.swing.amplitude) && std::isfinite(p.swing.frequency) &&
                               std::isfinite(p.swing.phase),
                           "swing parameters must be finite");
                 },
                 [](const KeyframedPath& p) {
                   require(p.keys.size() >= 2, "keyframed path needs at least 2 keyframes");
                   for (std::size_t i = 0; i < p.keys.size(); ++i) {
                     require(std::isfinite(p.keys[i].time) && finite(p.keys[i].position),
                             "keyframes must be finite");
                     if (i > 0) {
                       require(p.keys[i].time > p.keys[i - 1].time, "keyframe times must be strictly increasing");
                     }
                   }
                 },
             },
             trajectory);
}

std::pair<Vec3, Vec3> plane_basis(const Vec3& normal) {
  Vec3 seed = Vec3::UnitX();
  if (std::abs(normal.dot(seed)) > 0.9) seed = Vec3::UnitY();
  Vec3 e1 = (seed - seed.dot(normal) * normal).normalized();
  Vec3 e2 = normal.cross(e1);
  return {e1, e2};
}

Vec3 position_at(const Trajectory& trajectory, double t) {
  require_time(t);
  return std::visit(
      Overloaded{
          [](const StaticPath& p) -> Vec3 { return p.position; },
          [t](const LinearPath& p) -> Vec3 { return p.start + p.velocity * t; },
          [t](const CircularPath& p) -> Vec3 {
            const auto [e1, e2] = plane_basis(p.normal);
            const double angle = kTwoPi * t / p.period + p.phase;
            const Vec3 radial = std::cos(angle) * e1 + std::sin(angle) * e2;
            const Vec3 tangent = -std::sin(angle) * e1 + std::cos(angle) * e2;
            const double swing = p.swing.amplitude * std::sin(kTwoPi * p.swing.frequency * t + p.swing.phase);
            return p.center + p.radius * radial + swing * tangent;
          },
          [t](const KeyframedPath& p) -> Vec3 {
            const std::size_t k = segment_of(p, t);
            const Keyframe& a = p.keys[k];
            const Keyframe& b = p.keys[k + 1];
            const double u = (t - a.time) / (b.time - a.time);
            return a.position + u * (b.position - a.position);
          },
      },
      trajectory);
}

Vec3 velocity_at(const Trajectory& trajectory, double t) {
  require_time(t);
  return std::visit(
      Overloaded{
          [](const StaticPath&) -> Vec3 { return Vec3::Zero(); },
          [](const LinearPath& p) -> Vec3 { return p.velocity; },
          [t](const CircularPath& p) -> Vec3 {
            const auto [e1, e2] = plane_basis(p.normal);
            const double omega = kTwoPi / p.period;
            const double angle = omega * t + p.phase;
            const Vec3 radial = std::cos(angle) * e1 + std::sin(angle) * e2;
            const Vec3 tangent = -std::sin(angle) * e1 + std::cos(angle) * e2;
            const double swing_arg = kTwoPi * p.swing.frequency * t + p.swing.phase;
            const double swing = p.swing.amplitude * std::sin(swing_arg);
            const double swing_rate = p.swing.amplitude * kTwoPi * p.swing.frequency * std::cos(swing_arg);
            // d(tangent)/dt = -omega * radial
            return p.radius * omega * tangent + swing_rate * tangent - swing * omega * radial;
          },
          [t](const KeyframedPath& p) -> Vec3 {
            const std::size_t k = segment_of(p, t);
            const Keyframe& a = p.keys[k];
            const Keyframe& b = p.keys[k + 1];
            return (b.position - a.position) / (b.time - a.time);
          },
      },
      trajectory);
}

double radial_velocity(const Vec3& point_pos, const Vec3& point_vel, const Vec3& sensor_pos) {
  const Vec3 line_of_sight = point_pos - sensor_pos;
  const double distance = line_of_sight.norm();
  if (!(distance > 0.0)) throw DegenerateGeometryError("radial velocity undefined: point coincides with sensor");
  return point_vel.dot(line_of_sight) / distance;
}

void validate(const Target& target) {
  require(!target.id.empty(), "target id must not be empty");
  const std::string where = "target '" + target.id + "': ";
  require(target.reflectivity >= 0.0 && std::isfinite(target.reflectivity), where + "reflectivity must be >= 0");
  std::visit(Overloaded{
                 [&](const Sphere& s) { require(s.radius > 0.0 && std::isfinite(s.radius), where + "sphere radius must be > 0"); },
                 [&](const Capsule& c) {
                   require(c.radius > 0.0 && std::isfinite(c.radius), where + "capsule radius must be > 0");
                   require(finite(c.a) && finite(c.b), where + "capsule axis must be finite");
                 },
                 [&](const TriangleMesh& m) {
                   require(!m.triangles.empty(), where + "mesh needs at least one triangle");
                   for (const auto& v : m.vertices) require(finite(v), where + "mesh vertices must be finite");
                   for (const auto& tri : m.triangles) {
                     for (auto index : tri) require(index < m.vertices.size(), where + "mesh index out of range");
                   }
                 },
             },
             target.geometry);
  try {
    validate(target.trajectory);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(where + e.what());
  }
}

Scene::Scene(std::vector<Target> targets, SensorPose sensor, double frame_rate, std::uint32_t frame_count)
    : targets_(std::move(targets)), sensor_(sensor), frame_rate_(frame_rate), frame_count_(frame_count) {
  validate(sensor_);
  require(frame_rate_ > 0.0 && std::isfinite(frame_rate_), "frame_rate must be > 0");
  require(frame_count_ >= 1, "frame_count must be >= 1");
  std::set<std::string> ids;
  for (const auto& target : targets_) {
    validate(target);
    require(ids.insert(target.id).second, "duplicate target id '" + target.id + "'");
  }
}

const Target* Scene::find(std::string_view id) const {
  auto it = std::find_if(targets_.begin(), targets_.end(), [&](const Target& t) { return t.id == id; });
  return it == targets_.end() ? nullptr : &*it;
}

Scene make_walker_scene(const WalkerParams& params) {
  constexpr double kTorsoHeight = 1.15;
  constexpr double kHeadHeight = 1.62;
  constexpr double kLegHeight = 0.46;
  constexpr double kHipOffset = 0.1;

  auto circle_at = [&](double height, double swing_amplitude, double swing_phase) {
    CircularPath path;
    path.center = params.center + Vec3(0.0, 0.0, height);
    path.radius = params.radius;
    path.period = params.period;
    path.phase = params.phase;
    path.normal = Vec3::UnitZ();
    path.swing = {swing_amplitude, params.swing_frequency, swing_phase};
    return path;
  };

  std::vector<Target> parts;
  parts.push_back({std::string(kWalkerTorsoId), Capsule{{0, 0, -0.25}, {0, 0, 0.25}, 0.17}, params.reflectivity,
                   circle_at(kTorsoHeight, 0.0, 0.0)});
  parts.push_back({"head", Capsule{{0, 0, -0.04}, {0, 0, 0.04}, 0.11}, params.reflectivity,
                   circle_at(kHeadHeight, 0.0, 0.0)});
  parts.push_back({"leg_left", Capsule{{-kHipOffset, 0, -0.38}, {-kHipOffset, 0, 0.38}, 0.07}, params.reflectivity,
                   circle_at(kLegHeight, params.swing_amplitude, 0.0)});
  parts.push_back({"leg_right", Capsule{{kHipOffset, 0, -0.38}, {kHipOffset, 0, 0.38}, 0.07}, params.reflectivity,
                   circle_at(kLegHeight, params.swing_amplitude, std::numbers::pi)});

  SensorPose sensor;
  sensor.position = params.center + Vec3(0.0, -params.sensor_distance, kTorsoHeight);
  sensor.boresight = Vec3::UnitY();
  sensor.up = Vec3::UnitZ();
  sensor.fov_az = params.fov_az;
  sensor.fov_el = params.fov_el;

  require(params.sensor_distance > params.radius, "walker sensor must lie outside the circle");
  return Scene(std::move(parts), sensor, params.frame_rate, params.frame_count);
}

}  // namespace fmcwsim
