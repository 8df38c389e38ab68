#include "covpath/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace covpath {

double cast_ray(const WorldMap& world, const Eigen::Vector2d& origin, double angle,
                double max_range) {
  const GridSpec& spec = world.spec;
  Cell cur = spec.cell_of(origin);
  if (!spec.in_bounds(cur)) return max_range;
  if (world.is_obstacle(cur)) return 0.0;

  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  const double inf = std::numeric_limits<double>::infinity();

  // Amanatides-Woo traversal: t_max_* is the ray parameter at which the ray
  // crosses the next cell boundary on that axis.
  const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const double t_delta_x = step_x != 0 ? spec.resolution / std::abs(dx) : inf;
  const double t_delta_y = step_y != 0 ? spec.resolution / std::abs(dy) : inf;

  auto first_crossing = [&](double p, double o, double d, int step) {
    if (step == 0) return inf;
    const double rel = (p - o) / spec.resolution;
    const double boundary = step > 0 ? (std::floor(rel) + 1.0) * spec.resolution + o
                                     : std::floor(rel) * spec.resolution + o;
    return (boundary - p) / d;
  };
  double t_max_x = first_crossing(origin.x(), spec.origin.x(), dx, step_x);
  double t_max_y = first_crossing(origin.y(), spec.origin.y(), dy, step_y);

  while (true) {
    double t;
    if (t_max_x <= t_max_y) {
      t = t_max_x;
      t_max_x += t_delta_x;
      cur.x += step_x;
    } else {
      t = t_max_y;
      t_max_y += t_delta_y;
      cur.y += step_y;
    }
    if (t >= max_range) return max_range;
    if (!spec.in_bounds(cur)) return max_range;
    if (world.is_obstacle(cur)) return t;
  }
}

bool line_of_sight(const WorldMap& world, const Eigen::Vector2d& a,
                   const Eigen::Vector2d& b) {
  const Eigen::Vector2d delta = b - a;
  const double dist = delta.norm();
  if (dist <= 0.0) return true;
  const double angle = std::atan2(delta.y(), delta.x());
  return cast_ray(world, a, angle, dist) >= dist - 1e-9;
}

bool disk_collides(const WorldMap& world, const Eigen::Vector2d& p, double radius) {
  const GridSpec& spec = world.spec;
  if (!spec.in_bounds(p)) return true;
  const Cell lo = spec.cell_of(p - Eigen::Vector2d(radius, radius));
  const Cell hi = spec.cell_of(p + Eigen::Vector2d(radius, radius));
  const double r2 = radius * radius;
  for (int y = lo.y; y <= hi.y; ++y) {
    for (int x = lo.x; x <= hi.x; ++x) {
      const Cell c{x, y};
      if (!spec.in_bounds(c)) {
        // Outside the allocated grid counts as obstacle.
      } else if (world.is_free(c)) {
        continue;
      }
      const Eigen::Vector2d corner = spec.origin +
          Eigen::Vector2d(x * spec.resolution, y * spec.resolution);
      const double cx = std::clamp(p.x(), corner.x(), corner.x() + spec.resolution);
      const double cy = std::clamp(p.y(), corner.y(), corner.y() + spec.resolution);
      const double ddx = p.x() - cx;
      const double ddy = p.y() - cy;
      if (ddx * ddx + ddy * ddy < r2) return true;
    }
  }
  return false;
}

LidarScan simulate_lidar(const WorldMap& world, const Pose& pose,
                         const TaskProfile& profile, const NoiseModel& noise,
                         Rng& rng) {
  LidarScan scan;
  scan.ranges.resize(profile.lidar_rays);
  for (int k = 0; k < profile.lidar_rays; ++k) {
    const double angle = pose.theta + lidar_ray_angle(profile, k);
    double r = cast_ray(world, pose.position(), angle, profile.lidar_range);
    if (noise.sigma_lidar > 0.0) r += noise.sigma_lidar * rng.normal();
    scan.ranges[k] = std::clamp(r, 0.0, profile.lidar_range);
  }
  return scan;
}

MotionResult integrate_motion(const Pose& pose, const Action& action,
                              const TaskProfile& profile, const WorldMap& world,
                              int substeps) {
  const Action a = action.clamped();
  const double v = a.v_norm * profile.v_max;
  const double omega = a.omega_norm * profile.omega_max;
  const double ddt = profile.dt / substeps;

  MotionResult out;
  out.pose = pose;
  for (int k = 0; k < substeps; ++k) {
    const double step = v * ddt;
    const Eigen::Vector2d proposed =
        out.pose.position() + step * out.pose.heading();
    if (!disk_collides(world, proposed, profile.agent_radius)) {
      out.pose.x = proposed.x();
      out.pose.y = proposed.y();
      out.distance += std::abs(step);
    } else {
      out.collided = true;
    }
    out.pose.theta = wrap_angle(out.pose.theta + omega * ddt);
  }
  return out;
}

Pose perturb_pose(const Pose& pose, const NoiseModel& noise, Rng& rng) {
  if (!noise.enabled()) return pose;
  Pose p = pose;
  p.x += noise.sigma_pos * rng.normal();
  p.y += noise.sigma_pos * rng.normal();
  p.theta = wrap_angle(p.theta + noise.sigma_heading * rng.normal());
  return p;
}

}  // namespace covpath
