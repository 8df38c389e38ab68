#include "covpath/rewards.hpp"

#include <algorithm>
#include <cmath>

namespace covpath {

double reward_area(double a_new, const RewardParams& params, const TaskProfile& profile) {
  return params.lambda_area * a_new /
         (2.0 * profile.agent_radius * profile.v_max * profile.dt);
}

namespace {

// Accumulates the TV terms anchored inside a cell index box, clipped to the
// grid; out-of-range neighbors replicate the center value. On a binary mask
// each term is 1 (one unit difference) or sqrt(2) (both).
TvCounts tv_counts_over(const CoverageGrid& grid, int x0, int x1, int y0, int y1) {
  const auto& cells = grid.cells.cells;
  const int w = grid.spec.width;
  const int h = grid.spec.height;
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, w - 1);
  y1 = std::min(y1, h - 1);
  TvCounts out;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const int v = cells(x, y);
      const bool dx = (x + 1 < w ? cells(x + 1, y) : v) != v;
      const bool dy = (y + 1 < h ? cells(x, y + 1) : v) != v;
      if (dx && dy) ++out.diags;
      else if (dx || dy) ++out.ones;
    }
  }
  return out;
}

}  // namespace

double total_variation(const CoverageGrid& grid) {
  const auto& cells = grid.cells.cells;
  const int w = grid.spec.width;
  const int h = grid.spec.height;
  double sum = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = cells(x, y);
      const double dx = (x + 1 < w ? cells(x + 1, y) : v) - v;
      const double dy = (y + 1 < h ? cells(x, y + 1) : v) - v;
      if (dx != 0.0 || dy != 0.0) sum += std::sqrt(dx * dx + dy * dy);
    }
  }
  return grid.spec.resolution * sum;
}

TvCounts tv_counts(const CoverageGrid& grid) {
  return tv_counts_over(grid, 0, grid.spec.width - 1, 0, grid.spec.height - 1);
}

TvCounts tv_delta(CoverageGrid& grid, std::span<const Cell> newly_covered) {
  if (newly_covered.empty()) return {};
  int x0 = newly_covered[0].x, x1 = x0, y0 = newly_covered[0].y, y1 = y0;
  for (const Cell& c : newly_covered) {
    x0 = std::min(x0, c.x);
    x1 = std::max(x1, c.x);
    y0 = std::min(y0, c.y);
    y1 = std::max(y1, c.y);
  }
  // A changed cell (x,y) affects the terms anchored at (x,y), (x-1,y) and
  // (x,y-1); one cell of margin covers them all.
  const TvCounts after = tv_counts_over(grid, x0 - 1, x1 + 1, y0 - 1, y1 + 1);
  for (const Cell& c : newly_covered) grid.cells.at(c) = 0;
  const TvCounts before = tv_counts_over(grid, x0 - 1, x1 + 1, y0 - 1, y1 + 1);
  for (const Cell& c : newly_covered) grid.cells.at(c) = 1;
  return after - before;
}

double reward_tv_global(double tv_meters, double covered_area,
                        const RewardParams& params) {
  if (covered_area <= 0.0) return 0.0;
  return -params.lambda_tv_global * tv_meters / std::sqrt(covered_area);
}

double reward_tv_incremental(double tv_now, double tv_prev, const RewardParams& params,
                             const TaskProfile& profile) {
  return -params.lambda_tv_incremental * (tv_now - tv_prev) /
         (2.0 * profile.v_max * profile.dt);
}

RewardBreakdown step_reward(double a_new, double tv_now, double tv_prev,
                            double covered_area, bool collided,
                            const RewardParams& params, const TaskProfile& profile) {
  RewardBreakdown b;
  b.area = reward_area(a_new, params, profile);
  b.tv_global = reward_tv_global(tv_now, covered_area, params);
  b.tv_incremental = reward_tv_incremental(tv_now, tv_prev, params, profile);
  b.collision = collided ? params.r_coll : 0.0;
  b.constant = params.r_const;
  b.total = b.area + b.tv_global + b.tv_incremental + b.collision + b.constant;
  return b;
}

DoneReason check_termination(const EpisodeStatus& status, double covered_fraction) {
  if (covered_fraction >= status.goal_coverage) return DoneReason::Goal;
  if (status.steps_since_new >= status.tau) return DoneReason::Truncated;
  return DoneReason::Running;
}

}  // namespace covpath
