#include "covpath/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace covpath {

namespace {

// Walks the ray from `origin` over `length` meters, reporting every crossed
// cell (excluding the origin cell) with its entry parameter.
template <typename Visit>
void walk_ray(const GridSpec& spec, const Eigen::Vector2d& origin, double angle,
              double length, Visit&& visit) {
  Cell cur = spec.cell_of(origin);
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  const double inf = std::numeric_limits<double>::infinity();
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
    if (t >= length) return;
    if (!visit(cur, t)) return;
  }
}

}  // namespace

MapUpdate update_known_map(KnownMap& known, const LidarScan& scan, const Pose& pose,
                           const TaskProfile& profile) {
  MapUpdate out;
  auto mark_free = [&](Cell c) {
    if (!known.spec.in_bounds(c)) return;
    auto& v = known.cells.at(c);
    if (v == static_cast<std::uint8_t>(Knowledge::Unknown)) {
      v = static_cast<std::uint8_t>(Knowledge::Free);
      out.became_free.push_back(c);
    }
  };
  auto mark_obstacle = [&](Cell c) {
    if (!known.spec.in_bounds(c)) return;
    auto& v = known.cells.at(c);
    if (v != static_cast<std::uint8_t>(Knowledge::Obstacle)) {
      v = static_cast<std::uint8_t>(Knowledge::Obstacle);
      out.became_obstacle.push_back(c);
    }
  };

  const Eigen::Vector2d origin = pose.position();
  const Cell origin_cell = known.spec.cell_of(origin);
  for (int k = 0; k < profile.lidar_rays; ++k) {
    const double angle = pose.theta + lidar_ray_angle(profile, k);
    const double range = scan.ranges[k];
    const bool hit = range < profile.lidar_range - 1e-9;
    if (known.spec.in_bounds(origin_cell)) mark_free(origin_cell);
    // A hit range measures the distance to the obstacle boundary, so the
    // obstacle cell itself is entered an epsilon past the range.
    const double walk_len = hit ? range + 1e-9 : range;
    Cell last{-1, -1};
    bool have_last = false;
    walk_ray(known.spec, origin, angle, walk_len, [&](Cell c, double) {
      if (have_last) mark_free(last);
      last = c;
      have_last = true;
      return true;
    });
    if (have_last) {
      if (hit) mark_obstacle(last); else mark_free(last);
    } else if (hit && range <= 1e-12) {
      mark_obstacle(origin_cell);
    }
  }
  return out;
}

CoverageUpdate apply_coverage(CoverageGrid& coverage, const Pose& pose,
                              const TaskProfile& profile, const WorldMap& world) {
  CoverageUpdate out;
  const GridSpec& spec = coverage.spec;
  const double d = profile.coverage_radius;
  const Eigen::Vector2d p = pose.position();
  const bool full_fov = profile.coverage_fov >= 2.0 * M_PI - 1e-9;
  const double half_fov = profile.coverage_fov / 2.0;

  Cell lo = spec.cell_of(p - Eigen::Vector2d(d, d));
  Cell hi = spec.cell_of(p + Eigen::Vector2d(d, d));
  lo.x = std::max(lo.x, 0);
  lo.y = std::max(lo.y, 0);
  hi.x = std::min(hi.x, spec.width - 1);
  hi.y = std::min(hi.y, spec.height - 1);

  const double d2 = d * d;
  for (int y = lo.y; y <= hi.y; ++y) {
    for (int x = lo.x; x <= hi.x; ++x) {
      const Cell c{x, y};
      if (coverage.cells.at(c)) continue;
      if (world.is_obstacle(c)) continue;
      const Eigen::Vector2d q = spec.center_of(c);
      const Eigen::Vector2d delta = q - p;
      const double dist2 = delta.squaredNorm();
      if (dist2 > d2) continue;
      if (!full_fov && dist2 > 0.0) {
        const double bearing = wrap_angle(std::atan2(delta.y(), delta.x()) - pose.theta);
        if (std::abs(bearing) > half_fov + 1e-12) continue;
      }
      if (!line_of_sight(world, p, q)) continue;
      coverage.cells.at(c) = 1;
      ++coverage.covered_count;
      out.newly_covered.push_back(c);
    }
  }
  out.a_new = static_cast<double>(out.newly_covered.size()) * spec.cell_area();
  return out;
}

bool is_frontier_cell(Cell c, const CoverageGrid& coverage, const KnownMap& known) {
  if (coverage.is_covered(c)) return false;
  if (known.is_known_obstacle(c)) return false;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      if (coverage.is_covered(Cell{c.x + dx, c.y + dy})) return true;
    }
  return false;
}

FrontierGrid compute_frontier(const CoverageGrid& coverage, const KnownMap& known) {
  if (!(coverage.spec == known.spec))
    throw std::invalid_argument("compute_frontier: grids must share one spec");
  FrontierGrid frontier(coverage.spec);
  for (int y = 0; y < coverage.spec.height; ++y)
    for (int x = 0; x < coverage.spec.width; ++x)
      if (is_frontier_cell(Cell{x, y}, coverage, known))
        frontier.cells.at(x, y) = 1;
  return frontier;
}

ReachableRegion reachable_free_region(const WorldMap& world, const Pose& start,
                                      double agent_radius) {
  const GridSpec& spec = world.spec;
  const Cell start_cell = spec.cell_of(start.position());
  if (!spec.in_bounds(start_cell) || world.is_obstacle(start_cell))
    throw std::invalid_argument("reachable_free_region: start is inside an obstacle");

  ReachableRegion out;
  out.mask = Grid<std::uint8_t>(spec, 0);

  auto fits = [&](Cell c) {
    return !disk_collides(world, spec.center_of(c), agent_radius);
  };

  // The start pose itself has clearance but its cell center may not; seed
  // the fill from the nearest fitting cell around the start.
  Cell seed = start_cell;
  if (!fits(seed)) {
    bool found = false;
    const int max_ring = static_cast<int>(std::ceil(agent_radius / spec.resolution)) + 2;
    for (int ring = 1; ring <= max_ring && !found; ++ring) {
      for (int dy = -ring; dy <= ring && !found; ++dy)
        for (int dx = -ring; dx <= ring && !found; ++dx) {
          if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
          const Cell c{start_cell.x + dx, start_cell.y + dy};
          if (spec.in_bounds(c) && fits(c)) {
            seed = c;
            found = true;
          }
        }
    }
    if (!found) return out;  // agent is wedged; nothing reachable
  }

  std::deque<Cell> queue;
  queue.push_back(seed);
  out.mask.at(seed) = 1;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    ++out.cell_count;
    const Cell neighbors[4] = {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
    for (const Cell& n : neighbors) {
      if (!spec.in_bounds(n) || out.mask.at(n)) continue;
      if (!fits(n)) continue;
      out.mask.at(n) = 1;
      queue.push_back(n);
    }
  }
  out.area = out.cell_count * spec.cell_area();
  return out;
}

}  // namespace covpath
