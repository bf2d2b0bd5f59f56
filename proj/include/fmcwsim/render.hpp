#pragma once

// Single-bounce ray caster aligned with the radar: one ray per pixel, giving
// per-pixel range, return amplitude and radial velocity for a scene frame.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "fmcwsim/raster.hpp"
#include "fmcwsim/scene.hpp"

namespace fmcwsim {

/// Range value stored for pixels whose ray hits nothing.
inline constexpr float kMissRange = std::numeric_limits<float>::infinity();

struct CameraGrid {
  std::uint32_t n_az = 1;
  std::uint32_t n_el = 1;
  double fov_az = 1.0;
  double fov_el = 1.0;

  friend bool operator==(const CameraGrid&, const CameraGrid&) = default;
};

/// Grid covering the sensor's field of view. Throws InvalidArgument for a zero
/// pixel count.
CameraGrid make_grid(const SensorPose& sensor, std::uint32_t n_az, std::uint32_t n_el);

/// Rasters are n_el rows by n_az columns; row 0 is the lowest elevation and
/// column 0 the leftmost (most negative) azimuth.
struct FrameMaps {
  std::uint32_t frame_index = 0;
  double time = 0.0;
  CameraGrid grid{};
  Raster<float> range;            ///< m, kMissRange where nothing was hit
  Raster<float> amplitude;        ///< linear, 0 where nothing was hit
  Raster<float> radial_velocity;  ///< m/s, receding positive

  /// Allocates all-miss rasters for the grid.
  static FrameMaps empty(const CameraGrid& grid, std::uint32_t frame_index, double time);

  bool consistent() const;
  bool is_hit(std::size_t el, std::size_t az) const { return range(el, az) < kMissRange; }
};

struct PixelRay {
  Vec3 direction;
  double theta_az;
  double theta_el;
};

/// Equiangular grid: theta = fov * ((index + 0.5) / count - 0.5) for 0-based
/// indices; the direction is the boresight turned by theta_az toward
/// sensor.right() and by theta_el toward sensor.up.
PixelRay pixel_direction(const CameraGrid& grid, const SensorPose& sensor, std::uint32_t el, std::uint32_t az);

/// A target placed at its pose for one instant.
struct PosedTarget {
  const Target* target;
  Vec3 position;
  Vec3 velocity;
};

std::vector<PosedTarget> pose_targets(const Scene& scene, double t);

struct SurfaceHit {
  double distance;
  Vec3 normal;  ///< unit, facing against the ray
  std::size_t target_index;
};

/// Nearest hit with positive distance over all targets, or nullopt. Ties keep
/// the lowest target index so the result does not depend on insertion order
/// unless two surfaces coincide exactly.
std::optional<SurfaceHit> ray_intersect(const Vec3& origin, const Vec3& direction,
                                        std::span<const PosedTarget> targets);

/// Renders one frame: amplitude = sqrt(reflectivity) * max(cos incidence, 0) / R^2,
/// radial velocity evaluated analytically from the hit target's trajectory.
FrameMaps render_frame(const Scene& scene, const CameraGrid& grid, std::uint32_t frame_index);

}  // namespace fmcwsim
