#pragma once

#include <vector>

#include "covpath/raycast.hpp"
#include "covpath/world.hpp"

namespace covpath {

enum class Knowledge : std::uint8_t { Unknown = 0, Free = 1, Obstacle = 2 };

// The agent's accumulated knowledge of the environment. Cells only ever
// move unknown->free, unknown->obstacle or free->obstacle.
struct KnownMap {
  GridSpec spec;
  Grid<std::uint8_t> cells;

  KnownMap() = default;
  explicit KnownMap(const GridSpec& s) : spec(s), cells(s, 0) {}

  Knowledge at(Cell c) const { return static_cast<Knowledge>(cells.at_or(c, 0)); }
  bool is_known_obstacle(Cell c) const { return at(c) == Knowledge::Obstacle; }
  bool is_known_free(Cell c) const { return at(c) == Knowledge::Free; }
};

// Binary visited mask plus a cached covered cell count; the count always
// matches an exact recount of the mask.
struct CoverageGrid {
  GridSpec spec;
  Grid<std::uint8_t> cells;
  std::int64_t covered_count = 0;

  CoverageGrid() = default;
  explicit CoverageGrid(const GridSpec& s) : spec(s), cells(s, 0) {}

  bool is_covered(Cell c) const { return cells.at_or(c, 0) != 0; }
  double covered_area() const { return covered_count * spec.cell_area(); }
};

struct FrontierGrid {
  GridSpec spec;
  Grid<std::uint8_t> cells;

  FrontierGrid() = default;
  explicit FrontierGrid(const GridSpec& s) : spec(s), cells(s, 0) {}

  bool is_frontier(Cell c) const { return cells.at_or(c, 0) != 0; }
};

struct CoverageStats {
  double reachable_free_area = 0.0;  // m^2
  double covered_fraction = 0.0;     // covered AND reachable / reachable
  int steps_since_new_coverage = 0;
};

struct MapUpdate {
  std::vector<Cell> became_free;
  std::vector<Cell> became_obstacle;
};

// Marks cells traversed by each ray free up to the measured range; a ray
// that ends short of the max range marks its terminal cell as obstacle.
// Obstacle marks win over free and are never reverted.
MapUpdate update_known_map(KnownMap& known, const LidarScan& scan, const Pose& pose,
                           const TaskProfile& profile);

struct CoverageUpdate {
  double a_new = 0.0;  // m^2 newly covered this call
  std::vector<Cell> newly_covered;
};

// A fine cell becomes covered iff its center lies within the coverage
// radius, inside the angular field of view, and in line of sight of the
// pose through the ground-truth map. Idempotent.
CoverageUpdate apply_coverage(CoverageGrid& coverage, const Pose& pose,
                              const TaskProfile& profile, const WorldMap& world);

// Full-scan frontier extraction: a cell is frontier iff it is not covered,
// not a known obstacle, and at least one of its 8 neighbors is covered.
FrontierGrid compute_frontier(const CoverageGrid& coverage, const KnownMap& known);

// Direct per-cell frontier predicate (shared by the full scan and the
// incremental bookkeeping).
bool is_frontier_cell(Cell c, const CoverageGrid& coverage, const KnownMap& known);

// Cells where the agent disk fits, 4-connected flood fill from the start.
struct ReachableRegion {
  Grid<std::uint8_t> mask;
  std::int64_t cell_count = 0;
  double area = 0.0;  // m^2
};

ReachableRegion reachable_free_region(const WorldMap& world, const Pose& start,
                                      double agent_radius);

inline double reachable_free_area(const WorldMap& world, const Pose& start,
                                  double agent_radius) {
  return reachable_free_region(world, start, agent_radius).area;
}

}  // namespace covpath
