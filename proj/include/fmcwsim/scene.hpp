#pragma once

// Parametric scene description: targets with analytic trajectories, the
// radar/camera pose, and the animation clock.
//
// Conventions used throughout the library:
//   * SI units (m, s, m/s, Hz); angles in radians.
//   * Radial velocity is positive when the scatterer recedes from the sensor.
//   * All types are immutable values once validated; every free function here
//     is pure and may be called concurrently.

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace fmcwsim {

using Vec3 = Eigen::Vector3d;

struct SensorPose {
  Vec3 position = Vec3::Zero();
  Vec3 boresight = Vec3::UnitY();
  Vec3 up = Vec3::UnitZ();
  double fov_az = 1.0;  ///< full horizontal field of view, radians
  double fov_el = 1.0;  ///< full vertical field of view, radians

  /// boresight x up; positive azimuth turns toward this axis.
  Vec3 right() const { return boresight.cross(up); }
};

/// Throws InvalidArgument unless both axes are unit-norm and orthogonal
/// (1e-9) and 0 < fov < pi.
void validate(const SensorPose& sensor);

// --- trajectories -----------------------------------------------------------

struct StaticPath {
  Vec3 position = Vec3::Zero();
};

struct LinearPath {
  Vec3 start = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

/// Sinusoidal displacement along the direction of travel of a circular path.
/// Used by the walker preset to give limbs a Doppler spread.
struct TangentialSwing {
  double amplitude = 0.0;  ///< m
  double frequency = 0.0;  ///< Hz
  double phase = 0.0;      ///< rad
};

/// center + radius * (cos(w t + phase) e1 + sin(w t + phase) e2), w = 2 pi / period.
/// A negative period runs the circle clockwise about `normal`.
struct CircularPath {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  double period = 1.0;
  double phase = 0.0;
  Vec3 normal = Vec3::UnitZ();
  TangentialSwing swing{};
};

struct Keyframe {
  double time = 0.0;
  Vec3 position = Vec3::Zero();
};

/// Piecewise-linear through the keyframes; defined on [first.time, last.time].
struct KeyframedPath {
  std::vector<Keyframe> keys;
};

using Trajectory = std::variant<StaticPath, LinearPath, CircularPath, KeyframedPath>;

void validate(const Trajectory& trajectory);

/// Orthonormal basis (e1, e2) of the plane with the given unit normal, with
/// e2 = normal x e1. For normal = +z this is (+x, +y).
std::pair<Vec3, Vec3> plane_basis(const Vec3& normal);

/// Position at time t >= 0. Throws OutOfRangeError for negative t or, for a
/// keyframed path, t outside the keyframe span.
Vec3 position_at(const Trajectory& trajectory, double t);

/// Analytic time derivative of position_at. Keyframed paths use the slope of
/// the segment containing t (the later segment at an interior keyframe).
Vec3 velocity_at(const Trajectory& trajectory, double t);

/// Projection of point_vel on the unit line of sight from sensor_pos to
/// point_pos. Throws DegenerateGeometryError when the two points coincide.
double radial_velocity(const Vec3& point_pos, const Vec3& point_vel, const Vec3& sensor_pos);

// --- targets ----------------------------------------------------------------

/// Geometry is expressed in target-local coordinates; the trajectory position
/// is the local origin. Bodies translate only, they never rotate.
struct Sphere {
  double radius = 1.0;
};

struct Capsule {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::UnitZ();
  double radius = 0.1;
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
};

using Geometry = std::variant<Sphere, Capsule, TriangleMesh>;

struct Target {
  std::string id;
  Geometry geometry = Sphere{};
  double reflectivity = 1.0;  ///< dimensionless amplitude scale
  Trajectory trajectory = StaticPath{};
};

void validate(const Target& target);

class Scene {
 public:
  /// Validates every component; throws InvalidArgument on the first violation.
  Scene(std::vector<Target> targets, SensorPose sensor, double frame_rate, std::uint32_t frame_count);

  const std::vector<Target>& targets() const noexcept { return targets_; }
  const SensorPose& sensor() const noexcept { return sensor_; }
  double frame_rate() const noexcept { return frame_rate_; }
  std::uint32_t frame_count() const noexcept { return frame_count_; }

  double frame_time(std::uint32_t frame_index) const { return frame_index / frame_rate_; }

  /// nullptr when no target carries that id.
  const Target* find(std::string_view id) const;

 private:
  std::vector<Target> targets_;
  SensorPose sensor_;
  double frame_rate_;
  std::uint32_t frame_count_;
};

// --- walker preset ----------------------------------------------------------

/// Capsule pedestrian (torso, head, two legs) on a horizontal circle, with the
/// sensor in the torso's plane looking at the circle center from outside.
/// Dimensions are our choice; the defaults reproduce a 3 m circle walked once
/// in 100 frames at 24 Hz.
struct WalkerParams {
  double radius = 3.0;
  double period = 100.0 / 24.0;
  double phase = 0.0;
  Vec3 center = Vec3::Zero();  ///< circle center at ground level
  double sensor_distance = 8.0;  ///< horizontal distance sensor -> circle center
  double fov_az = 60.0 * std::numbers::pi / 180.0;
  double fov_el = 40.0 * std::numbers::pi / 180.0;
  double reflectivity = 1.0;
  double swing_amplitude = 0.0;  ///< leg swing along the tangent, m; 0 disables
  double swing_frequency = 1.8;  ///< Hz
  double frame_rate = 24.0;
  std::uint32_t frame_count = 100;
};

/// Target id of the walker's torso, the reference point for ground truth.
inline constexpr std::string_view kWalkerTorsoId = "torso";

Scene make_walker_scene(const WalkerParams& params = {});

}  // namespace fmcwsim
