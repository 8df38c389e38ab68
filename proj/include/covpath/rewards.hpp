#pragma once

#include <span>
#include <string>

#include "covpath/mapping.hpp"

namespace covpath {

// Reward scale factors. Defaults follow the evaluated configuration:
// lambda_area = 1, lambda_tv_global = 0, collision -10, constant -0.1,
// and lambda_tv_incremental = 1 for mowing / 0.2 for exploration.
struct RewardParams {
  double lambda_area = 1.0;
  double lambda_tv_global = 0.0;
  double lambda_tv_incremental = 1.0;
  double r_coll = -10.0;
  double r_const = -0.1;
};

inline RewardParams default_reward_params(const TaskProfile& profile) {
  RewardParams p;
  p.lambda_tv_incremental = profile.coverage_radius > profile.agent_radius ? 0.2 : 1.0;
  return p;
}

struct RewardBreakdown {
  double area = 0.0;
  double tv_global = 0.0;
  double tv_incremental = 0.0;
  double collision = 0.0;
  double constant = 0.0;
  double total = 0.0;
};

enum class DoneReason { Running, Goal, Truncated };

struct EpisodeStatus {
  double goal_coverage = 0.99;
  int tau = 1000;  // stale-step limit
  int steps_since_new = 0;
  DoneReason done_reason = DoneReason::Running;
};

// New-area reward, normalized by the largest area a straight full-speed
// step can sweep: 2 * r * v_max * dt.
double reward_area(double a_new, const RewardParams& params, const TaskProfile& profile);

// Discrete isotropic total variation of the coverage mask, in meters of
// boundary length. Neighbors past the grid edge replicate (zero diff).
double total_variation(const CoverageGrid& grid);

// On a binary mask every TV term is 0, 1 or sqrt(2); tracking the two
// counts keeps incremental maintenance drift-free: the telescoped sum over
// an episode reproduces the full-grid counts exactly.
struct TvCounts {
  std::int64_t ones = 0;
  std::int64_t diags = 0;

  double meters(double resolution) const {
    return (static_cast<double>(ones) + std::sqrt(2.0) * static_cast<double>(diags)) *
           resolution;
  }
  TvCounts& operator+=(const TvCounts& o) {
    ones += o.ones;
    diags += o.diags;
    return *this;
  }
  friend TvCounts operator-(const TvCounts& a, const TvCounts& b) {
    return {a.ones - b.ones, a.diags - b.diags};
  }
  friend bool operator==(const TvCounts&, const TvCounts&) = default;
};

TvCounts tv_counts(const CoverageGrid& grid);

// Change in TV counts caused by the just-applied coverage of
// `newly_covered` (the grid already reflects the change). Only the bounding
// box of the changed cells plus a one-cell margin is rescanned.
TvCounts tv_delta(CoverageGrid& grid, std::span<const Cell> newly_covered);

// Global TV reward: -lambda * V / sqrt(A_covered); 0 when nothing is
// covered yet (the first-step singularity is defined away).
double reward_tv_global(double tv_meters, double covered_area,
                        const RewardParams& params);

// Incremental TV reward: -lambda * (V_t - V_prev) / (2 * v_max * dt).
// Negative TV change (closing holes) yields positive reward.
double reward_tv_incremental(double tv_now, double tv_prev, const RewardParams& params,
                             const TaskProfile& profile);

RewardBreakdown step_reward(double a_new, double tv_now, double tv_prev,
                            double covered_area, bool collided,
                            const RewardParams& params, const TaskProfile& profile);

DoneReason check_termination(const EpisodeStatus& status, double covered_fraction);

inline const char* to_string(DoneReason r) {
  switch (r) {
    case DoneReason::Goal: return "goal";
    case DoneReason::Truncated: return "truncated";
    default: return "running";
  }
}

}  // namespace covpath
