#pragma once

#include <optional>
#include <string>
#include <vector>

#include "covpath/mapping.hpp"
#include "covpath/world.hpp"

namespace covpath {

enum class TaskKind { Mow, Explore };

inline TaskKind task_of(const TaskProfile& p) {
  return p.coverage_radius > p.agent_radius ? TaskKind::Explore : TaskKind::Mow;
}

// Procedural map generation parameters; sides, probabilities, room and
// obstacle dimensions follow the published generator.
struct GenParams {
  double resolution = 0.0375;
  double side_min_mow = 2.4;
  double side_max_mow = 7.5;
  double side_min_explore = 9.6;
  double side_max_explore = 15.0;
  double floorplan_prob = 0.7;
  double obstacle_prob = 0.7;
  double wall_keep_prob = 0.9;
  double room_side_min = 1.5;
  double room_side_max = 4.8;
  double wall_thickness_min = 0.075;
  double wall_thickness_max = 0.3;
  double door_width_min = 0.6;
  double door_width_max = 1.2;
  double obstacle_radius = 0.25;
  double area_per_obstacle = 4.0;  // one candidate per this many m^2
  double min_gap = 0.6;            // surface-to-surface clearance
  double clearance_radius = 0.15;  // erosion radius for connectivity checks

  double side_min(TaskKind t) const {
    return t == TaskKind::Mow ? side_min_mow : side_min_explore;
  }
  double side_max(TaskKind t) const {
    return t == TaskKind::Mow ? side_max_mow : side_max_explore;
  }
};

// Grid-of-rooms floor plan: spanning walls kept with wall_keep_prob, one
// door per adjacent room pair, then one door per spanning wall of one
// orientation closed again. Door positions are redrawn (up to 10 times)
// until the eroded free space is a single component; as a last resort the
// closings are dropped. A side too small for two rooms yields a plain
// bounded map.
WorldMap generate_floorplan(std::uint64_t seed, const GenParams& params, double side);

// Scatters floor(area / area_per_obstacle) candidate disks; a candidate
// that would come closer than min_gap (surface to surface) to any wall or
// already placed obstacle is discarded, which keeps the free space
// connected by construction. Placed centers are appended to `centers`.
WorldMap scatter_obstacles(std::uint64_t seed, const WorldMap& map,
                           const GenParams& params,
                           std::vector<Eigen::Vector2d>* centers = nullptr);

struct RandomMap {
  WorldMap world;
  double side = 0.0;
  bool has_floorplan = false;
  bool has_obstacles = false;
};

// Side uniform in the task's range, floor plan with 70% probability,
// obstacles with 70% probability; 9% of maps are plain bounded boxes.
RandomMap generate_random_map(std::uint64_t seed, TaskKind task,
                              const GenParams& params = {});

// True when every eroded-free cell belongs to one connected component.
bool map_fully_connected(const WorldMap& world, double agent_radius);

// Uniform pose over the largest component of eroded free cells, with a
// uniform heading. Empty optional when the agent fits nowhere.
std::optional<Pose> sample_start_pose(const WorldMap& world, double agent_radius,
                                      Rng& rng);

}  // namespace covpath
