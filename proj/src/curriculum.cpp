#include "covpath/curriculum.hpp"

#include <stdexcept>

namespace covpath {

const std::vector<MapTier>& default_tiers() {
  static const std::vector<MapTier> tiers = {
      {0, 2, 2.4, 3.0, MapTier::Features::Empty, 0xC0000000},
      {1, 4, 3.0, 4.8, MapTier::Features::Obstacles, 0xC1000000},
      {2, 8, 4.2, 6.0, MapTier::Features::Walls, 0xC2000000},
      {3, 6, 6.0, 7.5, MapTier::Features::Cluttered, 0xC3000000},
      {4, 8, 9.6, 12.0, MapTier::Features::Cluttered, 0xC4000000},
      {5, 18, 12.0, 15.0, MapTier::Features::Cluttered, 0xC5000000},
  };
  return tiers;
}

const std::vector<CurriculumLevel>& curriculum_levels(TaskKind task) {
  static const std::vector<CurriculumLevel> explore = {
      {1, {1, 2}, false, 0.90},       {2, {1, 2, 4}, false, 0.90},
      {3, {1, 2, 4}, false, 0.95},    {4, {1, 2, 4}, false, 0.97},
      {5, {1, 2, 4}, false, 0.99},    {6, {1, 2, 3, 4}, false, 0.99},
      {7, {1, 2, 3, 4}, true, 0.99},  {8, {1, 2, 3, 4, 5}, true, 0.99},
  };
  static const std::vector<CurriculumLevel> mow = {
      {1, {0}, false, 0.90},          {2, {0, 1}, false, 0.90},
      {3, {0, 1}, false, 0.95},       {4, {0, 1, 2}, false, 0.95},
      {5, {0, 1, 2}, false, 0.97},    {6, {0, 1, 2}, false, 0.99},
      {7, {0, 1, 2, 3}, false, 0.99}, {8, {0, 1, 2, 3}, true, 0.99},
  };
  return task == TaskKind::Explore ? explore : mow;
}

std::string fixed_map_id(int tier, int index) {
  return "t" + std::to_string(tier) + "_" + std::to_string(index);
}

WorldMap build_fixed_map(const MapTier& tier, int index, const GenParams& params) {
  if (index < 0 || index >= tier.map_count)
    throw std::out_of_range("build_fixed_map: index outside the tier");
  const std::uint64_t seed = tier.seed_base + static_cast<std::uint64_t>(index);
  Rng rng(seed, rng_stream::kMapGen);
  const double side = rng.uniform(tier.side_min, tier.side_max);
  const std::uint64_t floorplan_seed = rng.next_u64();
  const std::uint64_t obstacle_seed = rng.next_u64();

  WorldMap world;
  switch (tier.features) {
    case MapTier::Features::Empty: {
      world = WorldMap(GridSpec::from_extent(side, side, params.resolution));
      world.make_bounded();
      break;
    }
    case MapTier::Features::Obstacles: {
      world = WorldMap(GridSpec::from_extent(side, side, params.resolution));
      world.make_bounded();
      world = scatter_obstacles(obstacle_seed, world, params);
      break;
    }
    case MapTier::Features::Walls: {
      world = generate_floorplan(floorplan_seed, params, side);
      break;
    }
    case MapTier::Features::Cluttered: {
      world = generate_floorplan(floorplan_seed, params, side);
      world = scatter_obstacles(obstacle_seed, world, params);
      break;
    }
  }
  return world;
}

EpisodeMapChoice plan_episode_map(const CurriculumState& state, Rng& rng) {
  const CurriculumLevel& level = state.level();
  EpisodeMapChoice choice;
  choice.random = level.random_maps && rng.bernoulli(0.5);
  if (choice.random) {
    choice.random_seed = rng.next_u64();
    choice.map_id = "rand_" + std::to_string(choice.random_seed);
    return choice;
  }
  const auto& tiers = default_tiers();
  int total = 0;
  for (int t : level.tiers) total += tiers[t].map_count;
  int pick = static_cast<int>(rng.uniform_int(total));
  for (int t : level.tiers) {
    if (pick < tiers[t].map_count) {
      choice.tier = t;
      choice.index = pick;
      choice.map_id = fixed_map_id(t, pick);
      return choice;
    }
    pick -= tiers[t].map_count;
  }
  throw std::logic_error("plan_episode_map: empty tier pool");
}

EpisodeMap select_episode_map(const CurriculumState& state, std::uint64_t seed,
                              double agent_radius, const GenParams& params) {
  Rng rng(seed, rng_stream::kEpisode);
  const EpisodeMapChoice choice = plan_episode_map(state, rng);

  EpisodeMap out;
  out.map_id = choice.map_id;
  out.is_random = choice.random;
  out.goal_coverage = state.level().goal_coverage;
  if (choice.random) {
    RandomMap rm = generate_random_map(choice.random_seed, state.task, params);
    out.world = std::move(rm.world);
    out.has_floorplan = rm.has_floorplan;
    out.has_obstacles = rm.has_obstacles;
  } else {
    out.world = build_fixed_map(default_tiers()[choice.tier], choice.index, params);
  }

  auto start = sample_start_pose(out.world, agent_radius, rng);
  if (!start)
    throw std::runtime_error("select_episode_map: no collision-free start on " +
                             out.map_id);
  out.start = *start;
  return out;
}

const CurriculumLevel& curriculum_step(CurriculumState& state,
                                       const EpisodeResult& result) {
  if (result.reached_goal) {
    if (result.is_random) {
      if (result.has_floorplan) state.random_floorplan_done = true;
      if (result.has_obstacles) state.random_obstacles_done = true;
    } else {
      state.completed_fixed.insert(result.map_id);
    }
  }

  const CurriculumLevel& level = state.level();
  const auto& tiers = default_tiers();
  int fixed_total = 0;
  for (int t : level.tiers) fixed_total += tiers[t].map_count;

  bool fixed_done =
      static_cast<int>(state.completed_fixed.size()) >= fixed_total;
  if (fixed_done) {
    // Guard against stale ids carried over from other levels.
    int present = 0;
    for (int t : level.tiers)
      for (int i = 0; i < tiers[t].map_count; ++i)
        present += state.completed_fixed.contains(fixed_map_id(t, i)) ? 1 : 0;
    fixed_done = present >= fixed_total;
  }
  const bool random_done =
      !level.random_maps || (state.random_floorplan_done && state.random_obstacles_done);

  if (fixed_done && random_done &&
      state.level_index + 1 < static_cast<int>(curriculum_levels(state.task).size())) {
    ++state.level_index;
    state.completed_fixed.clear();
    state.random_floorplan_done = false;
    state.random_obstacles_done = false;
  }
  return state.level();
}

}  // namespace covpath
