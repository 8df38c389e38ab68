#include "covpath/mapgen.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace covpath {

namespace {

void rasterize_boundary(WorldMap& w, double thickness) {
  const GridSpec& s = w.spec;
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      const Eigen::Vector2d c = s.center_of({x, y});
      const double dx = std::min(c.x() - s.origin.x(), s.origin.x() + s.side_x() - c.x());
      const double dy = std::min(c.y() - s.origin.y(), s.origin.y() + s.side_y() - c.y());
      if (dx < thickness || dy < thickness) w.cells.at(x, y) = 1;
    }
  w.make_bounded();
}

// Fills cells whose center lies in [x0,x1) x [y0,y1) with `value`.
void fill_rect(WorldMap& w, double x0, double y0, double x1, double y1,
               std::uint8_t value) {
  const GridSpec& s = w.spec;
  Cell lo = s.cell_of({std::max(x0, s.origin.x()), std::max(y0, s.origin.y())});
  Cell hi = s.cell_of({std::min(x1, s.origin.x() + s.side_x() - 1e-9),
                       std::min(y1, s.origin.y() + s.side_y() - 1e-9)});
  for (int y = std::max(0, lo.y); y <= std::min(s.height - 1, hi.y); ++y)
    for (int x = std::max(0, lo.x); x <= std::min(s.width - 1, hi.x); ++x) {
      const Eigen::Vector2d c = s.center_of({x, y});
      if (c.x() >= x0 && c.x() < x1 && c.y() >= y0 && c.y() < y1)
        w.cells.at(x, y) = value;
    }
}

struct Door {
  bool vertical;   // door in a vertical wall
  int wall;        // wall index 1..n-1
  double lo, hi;   // span along the wall
};

}  // namespace

WorldMap generate_floorplan(std::uint64_t seed, const GenParams& params, double side) {
  Rng rng(seed, rng_stream::kMapGen);
  WorldMap walls(GridSpec::from_extent(side, side, params.resolution));

  const double room = rng.uniform(params.room_side_min, params.room_side_max);
  const double wall_t = rng.uniform(params.wall_thickness_min, params.wall_thickness_max);
  const double door_w = rng.uniform(params.door_width_min, params.door_width_max);
  rasterize_boundary(walls, wall_t / 2.0);

  const int n = static_cast<int>(std::floor(side / room));
  if (n < 2) return walls;  // too small for interior walls

  std::vector<bool> v_placed(n + 1, false), h_placed(n + 1, false);
  for (int i = 1; i < n; ++i) v_placed[i] = rng.bernoulli(params.wall_keep_prob);
  for (int i = 1; i < n; ++i) h_placed[i] = rng.bernoulli(params.wall_keep_prob);

  const double pitch = side / n;
  auto wall_lo = [&](int i) { return i * pitch - wall_t / 2.0; };
  auto wall_hi = [&](int i) { return i * pitch + wall_t / 2.0; };
  for (int i = 1; i < n; ++i) {
    if (v_placed[i]) fill_rect(walls, wall_lo(i), 0.0, wall_hi(i), side, 1);
    if (h_placed[i]) fill_rect(walls, 0.0, wall_lo(i), side, wall_hi(i), 1);
  }

  // Door positions are redrawn wholesale until the floor plan verifies
  // connected; wall placement stays fixed across attempts.
  for (int attempt = 0; attempt < 11; ++attempt) {
    WorldMap w = walls;
    std::vector<Door> doors;
    auto carve = [&](const Door& d) {
      if (d.vertical)
        fill_rect(w, wall_lo(d.wall), d.lo, wall_hi(d.wall), d.hi, 0);
      else
        fill_rect(w, d.lo, wall_lo(d.wall), d.hi, wall_hi(d.wall), 0);
    };

    for (int i = 1; i < n; ++i) {
      for (int seg = 0; seg < n; ++seg) {
        const double seg_lo = seg * pitch + wall_t;
        const double seg_hi = (seg + 1) * pitch - wall_t;
        const double len = std::min(door_w, seg_hi - seg_lo);
        double lo;
        if (seg_hi - seg_lo > len)
          lo = rng.uniform(seg_lo, seg_hi - len);
        else
          lo = (seg_lo + seg_hi - len) / 2.0;
        if (v_placed[i]) {
          doors.push_back({true, i, lo, lo + len});
          carve(doors.back());
        }
        if (h_placed[i]) {
          doors.push_back({false, i, lo, lo + len});
          carve(doors.back());
        }
      }
    }

    // Close one opening at random per spanning wall, for vertical or
    // horizontal walls but never both; skipped on the final fallback pass.
    if (attempt < 10) {
      const bool close_vertical = rng.bernoulli(0.5);
      for (int i = 1; i < n; ++i) {
        const bool placed = close_vertical ? v_placed[i] : h_placed[i];
        if (!placed) continue;
        std::vector<const Door*> candidates;
        for (const Door& d : doors)
          if (d.vertical == close_vertical && d.wall == i) candidates.push_back(&d);
        if (candidates.empty()) continue;
        const Door* shut = candidates[rng.uniform_int(candidates.size())];
        if (shut->vertical)
          fill_rect(w, wall_lo(i), shut->lo, wall_hi(i), shut->hi, 1);
        else
          fill_rect(w, shut->lo, wall_lo(i), shut->hi, wall_hi(i), 1);
      }
    }

    if (map_fully_connected(w, params.clearance_radius)) return w;
  }
  return walls;  // unreachable in practice; the all-doors-open pass verifies
}

WorldMap scatter_obstacles(std::uint64_t seed, const WorldMap& map,
                           const GenParams& params,
                           std::vector<Eigen::Vector2d>* centers) {
  Rng rng(seed, rng_stream::kMapGen);
  WorldMap w = map;
  const GridSpec& s = w.spec;
  const double r = params.obstacle_radius;
  const double wall_clear = r + params.min_gap;
  const double pair_clear = 2.0 * r + params.min_gap;

  const int candidates =
      static_cast<int>(std::floor(s.side_x() * s.side_y() / params.area_per_obstacle));
  std::vector<Eigen::Vector2d> placed;
  for (int i = 0; i < candidates; ++i) {
    const Eigen::Vector2d c(rng.uniform(s.origin.x(), s.origin.x() + s.side_x()),
                            rng.uniform(s.origin.y(), s.origin.y() + s.side_y()));
    bool ok = true;
    for (const Eigen::Vector2d& p : placed)
      if ((c - p).norm() < pair_clear) {
        ok = false;
        break;
      }
    // disk_collides with an inflated radius measures clearance to walls and
    // previously rasterized obstacles alike.
    if (ok && disk_collides(w, c, wall_clear)) ok = false;
    if (!ok) continue;

    placed.push_back(c);
    const Cell lo = s.cell_of(c - Eigen::Vector2d(r, r));
    const Cell hi = s.cell_of(c + Eigen::Vector2d(r, r));
    for (int y = std::max(0, lo.y); y <= std::min(s.height - 1, hi.y); ++y)
      for (int x = std::max(0, lo.x); x <= std::min(s.width - 1, hi.x); ++x)
        if ((s.center_of({x, y}) - c).norm() <= r) w.cells.at(x, y) = 1;
  }
  if (centers) centers->insert(centers->end(), placed.begin(), placed.end());
  return w;
}

RandomMap generate_random_map(std::uint64_t seed, TaskKind task,
                              const GenParams& params) {
  Rng rng(seed, rng_stream::kMapGen);
  RandomMap out;
  out.side = rng.uniform(params.side_min(task), params.side_max(task));
  out.has_floorplan = rng.bernoulli(params.floorplan_prob);
  out.has_obstacles = rng.bernoulli(params.obstacle_prob);
  const std::uint64_t floorplan_seed = rng.next_u64();
  const std::uint64_t obstacle_seed = rng.next_u64();

  if (out.has_floorplan) {
    out.world = generate_floorplan(floorplan_seed, params, out.side);
  } else {
    out.world = WorldMap(GridSpec::from_extent(out.side, out.side, params.resolution));
    rasterize_boundary(out.world, params.wall_thickness_min);
  }
  if (out.has_obstacles) out.world = scatter_obstacles(obstacle_seed, out.world, params);
  return out;
}

bool map_fully_connected(const WorldMap& world, double agent_radius) {
  const GridSpec& s = world.spec;
  Grid<std::uint8_t> fit(s, 0);
  Cell seed{-1, -1};
  std::int64_t fit_count = 0;
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x)
      if (!disk_collides(world, s.center_of({x, y}), agent_radius)) {
        fit.at(x, y) = 1;
        ++fit_count;
        if (seed.x < 0) seed = {x, y};
      }
  if (fit_count == 0) return false;

  std::deque<Cell> queue{seed};
  Grid<std::uint8_t> seen(s, 0);
  seen.at(seed) = 1;
  std::int64_t reached = 0;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    ++reached;
    const Cell neighbors[4] = {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
    for (const Cell& nb : neighbors) {
      if (!s.in_bounds(nb) || seen.at(nb) || !fit.at(nb)) continue;
      seen.at(nb) = 1;
      queue.push_back(nb);
    }
  }
  return reached == fit_count;
}

std::optional<Pose> sample_start_pose(const WorldMap& world, double agent_radius,
                                      Rng& rng) {
  const GridSpec& s = world.spec;
  Grid<std::int32_t> label(s, 0);
  std::vector<std::vector<Cell>> components;

  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      if (label.at(x, y) != 0) continue;
      if (disk_collides(world, s.center_of({x, y}), agent_radius)) {
        label.at(x, y) = -1;
        continue;
      }
      components.emplace_back();
      auto& comp = components.back();
      const auto id = static_cast<std::int32_t>(components.size());
      std::deque<Cell> queue{{x, y}};
      label.at(x, y) = id;
      while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        comp.push_back(c);
        const Cell neighbors[4] = {
            {c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
        for (const Cell& nb : neighbors) {
          if (!s.in_bounds(nb) || label.at(nb) != 0) continue;
          if (disk_collides(world, s.center_of(nb), agent_radius)) {
            label.at(nb) = -1;
            continue;
          }
          label.at(nb) = id;
          queue.push_back(nb);
        }
      }
    }

  if (components.empty()) return std::nullopt;
  const auto& largest = *std::max_element(
      components.begin(), components.end(),
      [](const auto& a, const auto& b) { return a.size() < b.size(); });
  const Cell c = largest[rng.uniform_int(largest.size())];
  const Eigen::Vector2d p = s.center_of(c);
  return Pose{p.x(), p.y(), rng.uniform(-M_PI, M_PI)};
}

}  // namespace covpath
