#include "fmcwsim/render.hpp"

#include <cmath>

#include "fmcwsim/errors.hpp"
#include "fmcwsim/parallel.hpp"

namespace fmcwsim {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kMinDistance = 1e-9;

struct LocalHit {
  double distance;
  Vec3 normal;
};

// Smallest root of |o + t d - c|^2 = r^2 above kMinDistance.
std::optional<LocalHit> hit_sphere(const Vec3& origin, const Vec3& dir, const Vec3& center, double radius) {
  const Vec3 oc = origin - center;
  const double b = oc.dot(dir);
  const double c = oc.squaredNorm() - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  double t = -b - root;
  if (t <= kMinDistance) t = -b + root;
  if (t <= kMinDistance) return std::nullopt;
  return LocalHit{t, (origin + t * dir - center) / radius};
}

std::optional<LocalHit> closer(std::optional<LocalHit> a, std::optional<LocalHit> b) {
  if (!a) return b;
  if (!b) return a;
  return b->distance < a->distance ? b : a;
}

// Finite cylinder body plus the two end spheres.
std::optional<LocalHit> hit_capsule(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b, double radius) {
  const Vec3 axis_full = b - a;
  const double length = axis_full.norm();
  std::optional<LocalHit> best = closer(hit_sphere(origin, dir, a, radius), hit_sphere(origin, dir, b, radius));
  if (length <= 0.0) return best;

  const Vec3 axis = axis_full / length;
  const Vec3 oa = origin - a;
  const Vec3 d_perp = dir - dir.dot(axis) * axis;
  const Vec3 o_perp = oa - oa.dot(axis) * axis;
  const double qa = d_perp.squaredNorm();
  if (qa > 0.0) {
    const double qb = d_perp.dot(o_perp);
    const double qc = o_perp.squaredNorm() - radius * radius;
    const double disc = qb * qb - qa * qc;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      for (double t : {(-qb - root) / qa, (-qb + root) / qa}) {
        if (t <= kMinDistance) continue;
        const Vec3 p = origin + t * dir;
        const double s = (p - a).dot(axis);
        if (s < 0.0 || s > length) continue;
        const Vec3 normal = (p - (a + s * axis)) / radius;
        best = closer(best, LocalHit{t, normal});
        break;
      }
    }
  }
  return best;
}

// Moller-Trumbore; triangles are two-sided.
std::optional<LocalHit> hit_triangle(const Vec3& origin, const Vec3& dir, const Vec3& v0, const Vec3& v1,
                                     const Vec3& v2) {
  const Vec3 e1 = v1 - v0;
  const Vec3 e2 = v2 - v0;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-15) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = origin - v0;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = dir.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (t <= kMinDistance) return std::nullopt;
  return LocalHit{t, e1.cross(e2).normalized()};
}

std::optional<LocalHit> hit_geometry(const Vec3& origin, const Vec3& dir, const Geometry& geometry,
                                     const Vec3& offset) {
  return std::visit(Overloaded{
                        [&](const Sphere& s) { return hit_sphere(origin, dir, offset, s.radius); },
                        [&](const Capsule& c) { return hit_capsule(origin, dir, offset + c.a, offset + c.b, c.radius); },
                        [&](const TriangleMesh& m) {
                          std::optional<LocalHit> best;
                          for (const auto& tri : m.triangles) {
                            best = closer(best, hit_triangle(origin, dir, offset + m.vertices[tri[0]],
                                                             offset + m.vertices[tri[1]], offset + m.vertices[tri[2]]));
                          }
                          return best;
                        },
                    },
                    geometry);
}

}  // namespace

CameraGrid make_grid(const SensorPose& sensor, std::uint32_t n_az, std::uint32_t n_el) {
  if (n_az == 0 || n_el == 0) throw InvalidArgument("camera grid needs at least one pixel per axis");
  return CameraGrid{n_az, n_el, sensor.fov_az, sensor.fov_el};
}

FrameMaps FrameMaps::empty(const CameraGrid& grid, std::uint32_t frame_index, double time) {
  FrameMaps maps;
  maps.frame_index = frame_index;
  maps.time = time;
  maps.grid = grid;
  maps.range = Raster<float>(grid.n_el, grid.n_az, kMissRange);
  maps.amplitude = Raster<float>(grid.n_el, grid.n_az, 0.0f);
  maps.radial_velocity = Raster<float>(grid.n_el, grid.n_az, 0.0f);
  return maps;
}

bool FrameMaps::consistent() const {
  return range.rows() == grid.n_el && range.cols() == grid.n_az && range.same_shape(amplitude) &&
         range.same_shape(radial_velocity);
}

PixelRay pixel_direction(const CameraGrid& grid, const SensorPose& sensor, std::uint32_t el, std::uint32_t az) {
  if (el >= grid.n_el || az >= grid.n_az) throw OutOfRangeError("pixel index out of range");
  const double theta_az = grid.fov_az * ((az + 0.5) / grid.n_az - 0.5);
  const double theta_el = grid.fov_el * ((el + 0.5) / grid.n_el - 0.5);
  const Vec3 horizontal = std::cos(theta_az) * sensor.boresight + std::sin(theta_az) * sensor.right();
  const Vec3 direction = std::cos(theta_el) * horizontal + std::sin(theta_el) * sensor.up;
  return {direction.normalized(), theta_az, theta_el};
}

std::vector<PosedTarget> pose_targets(const Scene& scene, double t) {
  std::vector<PosedTarget> posed;
  posed.reserve(scene.targets().size());
  for (const auto& target : scene.targets()) {
    posed.push_back({&target, position_at(target.trajectory, t), velocity_at(target.trajectory, t)});
  }
  return posed;
}

std::optional<SurfaceHit> ray_intersect(const Vec3& origin, const Vec3& direction,
                                        std::span<const PosedTarget> targets) {
  std::optional<SurfaceHit> best;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto hit = hit_geometry(origin, direction, targets[i].target->geometry, targets[i].position);
    if (!hit) continue;
    if (!best || hit->distance < best->distance) {
      Vec3 normal = hit->normal;
      if (normal.dot(direction) > 0.0) normal = -normal;
      best = SurfaceHit{hit->distance, normal, i};
    }
  }
  return best;
}

FrameMaps render_frame(const Scene& scene, const CameraGrid& grid, std::uint32_t frame_index) {
  if (frame_index >= scene.frame_count()) throw OutOfRangeError("frame index beyond scene frame_count");
  const double t = scene.frame_time(frame_index);
  const SensorPose& sensor = scene.sensor();
  const std::vector<PosedTarget> posed = pose_targets(scene, t);
  FrameMaps maps = FrameMaps::empty(grid, frame_index, t);

  parallel_for(grid.n_el, [&](std::size_t row) {
    const auto el = static_cast<std::uint32_t>(row);
    for (std::uint32_t az = 0; az < grid.n_az; ++az) {
      const PixelRay ray = pixel_direction(grid, sensor, el, az);
      const auto hit = ray_intersect(sensor.position, ray.direction, posed);
      if (!hit) continue;
      const PosedTarget& target = posed[hit->target_index];
      const double cos_incidence = std::max(-hit->normal.dot(ray.direction), 0.0);
      const double amplitude =
          std::sqrt(target.target->reflectivity) * cos_incidence / (hit->distance * hit->distance);
      const Vec3 point = sensor.position + hit->distance * ray.direction;
      maps.range(el, az) = static_cast<float>(hit->distance);
      maps.amplitude(el, az) = static_cast<float>(amplitude);
      maps.radial_velocity(el, az) = static_cast<float>(radial_velocity(point, target.velocity, sensor.position));
    }
  });
  return maps;
}

}  // namespace fmcwsim
