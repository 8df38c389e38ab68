#pragma once

#include <Eigen/Dense>

#include "covpath/mapping.hpp"
#include "covpath/rng.hpp"
#include "covpath/world.hpp"

namespace covpath::testing {

// Bounded world of the given side length, free inside.
inline WorldMap empty_world(double side_m, double res = 0.05) {
  WorldMap w(GridSpec::from_extent(side_m, side_m, res));
  w.make_bounded();
  return w;
}

// Axis-aligned rectangular obstacle block given in world meters.
inline void add_block(WorldMap& w, double x0, double y0, double x1, double y1) {
  const GridSpec& s = w.spec;
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      const Eigen::Vector2d c = s.center_of({x, y});
      if (c.x() >= x0 && c.x() < x1 && c.y() >= y0 && c.y() < y1)
        w.cells.at(x, y) = 1;
    }
}

// Bounded world with randomly scattered obstacle cells.
inline WorldMap random_world(Rng& rng, int cells_per_side, double obstacle_prob,
                             double res = 0.05) {
  WorldMap w(GridSpec(res, cells_per_side, cells_per_side));
  for (int y = 0; y < cells_per_side; ++y)
    for (int x = 0; x < cells_per_side; ++x)
      if (rng.uniform() < obstacle_prob) w.cells.at(x, y) = 1;
  w.make_bounded();
  return w;
}

// 90 degree CCW rotation of a square world about its grid center.
inline WorldMap rotate_world_ccw(const WorldMap& w) {
  const int n = w.spec.width;
  WorldMap out(GridSpec(w.spec.resolution, n, n, w.spec.origin));
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) out.cells.at(n - 1 - y, x) = w.cells.at(x, y);
  return out;
}

inline Eigen::Vector2d rotate_point_ccw(const Eigen::Vector2d& p, const GridSpec& spec) {
  const Eigen::Vector2d c =
      spec.origin + 0.5 * Eigen::Vector2d(spec.side_x(), spec.side_y());
  const Eigen::Vector2d d = p - c;
  return c + Eigen::Vector2d(-d.y(), d.x());
}

inline Pose random_free_pose(Rng& rng, const WorldMap& w, double agent_radius) {
  for (int tries = 0; tries < 10000; ++tries) {
    Pose p;
    p.x = rng.uniform(w.spec.origin.x(), w.spec.origin.x() + w.spec.side_x());
    p.y = rng.uniform(w.spec.origin.y(), w.spec.origin.y() + w.spec.side_y());
    p.theta = rng.uniform(-M_PI, M_PI);
    if (!disk_collides(w, p.position(), agent_radius)) return p;
  }
  throw std::runtime_error("random_free_pose: no free pose found");
}

}  // namespace covpath::testing
