#pragma once

#include <set>
#include <string>
#include <vector>

#include "covpath/mapgen.hpp"

namespace covpath {

// Seeded generator preset standing in for one tier of fixed training maps.
// Higher tiers are larger and more cluttered.
struct MapTier {
  int id = 0;
  int map_count = 0;
  double side_min = 0.0;
  double side_max = 0.0;
  enum class Features { Empty, Obstacles, Walls, Cluttered } features = Features::Empty;
  std::uint64_t seed_base = 0;
};

struct CurriculumLevel {
  int level = 0;
  std::vector<int> tiers;
  bool random_maps = false;
  double goal_coverage = 0.9;
};

const std::vector<MapTier>& default_tiers();
const std::vector<CurriculumLevel>& curriculum_levels(TaskKind task);

std::string fixed_map_id(int tier, int index);
WorldMap build_fixed_map(const MapTier& tier, int index, const GenParams& params = {});

// Progress through the levels: a level is complete when every fixed map in
// it has reached the level's goal coverage, plus one random-floor-plan map
// and one random-obstacle map when the level uses random maps. Completion
// flags reset on advancement because the goal coverage escalates.
struct CurriculumState {
  TaskKind task = TaskKind::Mow;
  int level_index = 0;  // index into curriculum_levels(task)
  std::set<std::string> completed_fixed;
  bool random_floorplan_done = false;
  bool random_obstacles_done = false;

  const CurriculumLevel& level() const { return curriculum_levels(task)[level_index]; }
  int level_number() const { return level().level; }
};

struct EpisodeMapChoice {
  bool random = false;
  int tier = -1;
  int index = -1;
  std::uint64_t random_seed = 0;
  std::string map_id;
};

// The cheap half of episode selection: fixed-vs-random coin (50/50 when the
// level allows random maps) and the uniform pick within the pool.
EpisodeMapChoice plan_episode_map(const CurriculumState& state, Rng& rng);

struct EpisodeMap {
  WorldMap world;
  Pose start;
  std::string map_id;
  bool is_random = false;
  bool has_floorplan = false;
  bool has_obstacles = false;
  double goal_coverage = 0.9;
};

EpisodeMap select_episode_map(const CurriculumState& state, std::uint64_t seed,
                              double agent_radius, const GenParams& params = {});

struct EpisodeResult {
  std::string map_id;
  bool reached_goal = false;
  bool is_random = false;
  bool has_floorplan = false;
  bool has_obstacles = false;
};

// Records the result and advances the level when its requirements are met;
// returns the (possibly new) current level.
const CurriculumLevel& curriculum_step(CurriculumState& state,
                                       const EpisodeResult& result);

}  // namespace covpath
