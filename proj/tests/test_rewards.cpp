#include <cmath>

#include "covpath/rewards.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace covpath;
using namespace covpath::testing;

namespace {

// Brute-force evaluation of the isotropic TV sum with replicated borders,
// kept deliberately naive and separate from the implementation.
double brute_force_tv(const CoverageGrid& g) {
  double sum = 0.0;
  for (int y = 0; y < g.spec.height; ++y) {
    for (int x = 0; x < g.spec.width; ++x) {
      const double v = g.cells.at(x, y);
      const double right = x + 1 < g.spec.width ? g.cells.at(x + 1, y) : v;
      const double up = y + 1 < g.spec.height ? g.cells.at(x, y + 1) : v;
      const double dx = right - v;
      const double dy = up - v;
      if (dx != 0.0 || dy != 0.0) sum += std::sqrt(dx * dx + dy * dy);
    }
  }
  return g.spec.resolution * sum;
}

CoverageGrid random_coverage(Rng& rng, int n, double p, double res = 1.0) {
  CoverageGrid g(GridSpec(res, n, n));
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (rng.uniform() < p) {
        g.cells.at(x, y) = 1;
        ++g.covered_count;
      }
  return g;
}

}  // namespace

TEST_CASE("reward_area: zero, unit and half step sweeps") {
  const TaskProfile mow = mow_profile();
  RewardParams params = default_reward_params(mow);
  CHECK(reward_area(0.0, params, mow) == 0.0);
  // Denominator 2 * 0.15 * 0.26 * 0.5 = 0.039.
  CHECK(reward_area(0.039, params, mow) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reward_area(0.0195, params, mow) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("total_variation: canonical patterns") {
  CoverageGrid g(GridSpec(1.0, 9, 9));
  CHECK(total_variation(g) == 0.0);

  g.cells.at(4, 4) = 1;
  CHECK(total_variation(g) == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-15));

  CoverageGrid block(GridSpec(1.0, 9, 9));
  block.cells.at(4, 4) = 1;
  block.cells.at(5, 4) = 1;
  block.cells.at(4, 5) = 1;
  block.cells.at(5, 5) = 1;
  CHECK(total_variation(block) == doctest::Approx(6.0 + std::sqrt(2.0)).epsilon(1e-15));

  SUBCASE("resolution scales the boundary length") {
    CoverageGrid fine(GridSpec(0.0375, 9, 9));
    fine.cells.at(4, 4) = 1;
    CHECK(total_variation(fine) ==
          doctest::Approx((2.0 + std::sqrt(2.0)) * 0.0375).epsilon(1e-15));
  }
}

TEST_CASE("total_variation matches the brute force oracle exactly on 1000 grids") {
  Rng rng(13, rng_stream::kMapGen);
  for (int trial = 0; trial < 1000; ++trial) {
    CoverageGrid g = random_coverage(rng, 64, rng.uniform(0.05, 0.95));
    REQUIRE(total_variation(g) == brute_force_tv(g));
    const TvCounts c = tv_counts(g);
    REQUIRE(c.meters(g.spec.resolution) ==
            doctest::Approx(brute_force_tv(g)).epsilon(1e-12));
  }
}

TEST_CASE("tv_delta telescopes exactly over a random coverage episode") {
  Rng rng(29, rng_stream::kMapGen);
  CoverageGrid g(GridSpec(0.05, 80, 80));
  const TvCounts initial = tv_counts(g);
  TvCounts running = initial;
  for (int step = 0; step < 300; ++step) {
    std::vector<Cell> batch;
    const int k = 1 + static_cast<int>(rng.uniform_int(12));
    for (int i = 0; i < k; ++i) {
      Cell c{static_cast<int>(rng.uniform_int(80)), static_cast<int>(rng.uniform_int(80))};
      if (!g.cells.at(c)) {
        g.cells.at(c) = 1;
        ++g.covered_count;
        batch.push_back(c);
      }
    }
    running += tv_delta(g, batch);
  }
  REQUIRE(running == tv_counts(g));
}

TEST_CASE("reward_tv_global: disabled by default, scale invariant when on") {
  RewardParams off;
  CHECK(off.lambda_tv_global == 0.0);
  CHECK(reward_tv_global(123.4, 5.0, off) == 0.0);

  RewardParams on;
  on.lambda_tv_global = 1.0;
  CHECK(reward_tv_global(4.0, 1.0, on) == doctest::Approx(-4.0));
  // Doubling the world scales V by 2 and A by 4 and leaves the reward fixed.
  CHECK(reward_tv_global(8.0, 4.0, on) == reward_tv_global(4.0, 1.0, on));
  // First-step singularity is defined to zero.
  CHECK(reward_tv_global(4.0, 0.0, on) == 0.0);
}

TEST_CASE("reward_tv_incremental: sign convention and normalization") {
  const TaskProfile mow = mow_profile();
  RewardParams params = default_reward_params(mow);
  REQUIRE(params.lambda_tv_incremental == 1.0);
  CHECK(reward_tv_incremental(7.0, 7.0, params, mow) == 0.0);
  // A fresh straight strip grows the boundary by twice the step distance.
  const double dv = 2.0 * mow.v_max * mow.dt;
  CHECK(reward_tv_incremental(dv, 0.0, params, mow) == doctest::Approx(-1.0).epsilon(1e-12));
  // Closing a hole shrinks the boundary and pays out.
  CHECK(reward_tv_incremental(3.0, 3.5, params, mow) > 0.0);

  const TaskProfile ex = explore_dir_profile();
  CHECK(default_reward_params(ex).lambda_tv_incremental == 0.2);
}

TEST_CASE("step_reward: published constants compose exactly") {
  const TaskProfile mow = mow_profile();
  RewardParams params = default_reward_params(mow);
  REQUIRE(params.r_coll == -10.0);
  REQUIRE(params.r_const == -0.1);

  SUBCASE("stale step") {
    RewardBreakdown b = step_reward(0.0, 5.0, 5.0, 2.0, false, params, mow);
    CHECK(b.total == -0.1);
  }
  SUBCASE("collision step") {
    RewardBreakdown b = step_reward(0.0, 5.0, 5.0, 2.0, true, params, mow);
    CHECK(b.total == -10.1);
  }
  SUBCASE("mow step over fresh ground") {
    RewardBreakdown b = step_reward(0.039, 1.26, 1.0, 2.0, false, params, mow);
    CHECK(b.area == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.tv_incremental == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(b.total == doctest::Approx(-0.1).epsilon(1e-9));
  }
}

TEST_CASE("reward breakdown total equals the component sum") {
  Rng rng(41, rng_stream::kMapGen);
  const TaskProfile mow = mow_profile();
  RewardParams params = default_reward_params(mow);
  params.lambda_tv_global = 0.3;
  for (int i = 0; i < 1000; ++i) {
    RewardBreakdown b =
        step_reward(rng.uniform(0, 0.05), rng.uniform(0, 10), rng.uniform(0, 10),
                    rng.uniform(0.01, 30), rng.bernoulli(0.2), params, mow);
    REQUIRE(std::abs(b.total - (b.area + b.tv_global + b.tv_incremental +
                                b.collision + b.constant)) < 1e-12);
  }
}

TEST_CASE("area reward stays bounded for straight mowing steps") {
  // Geometric bound: a straight step sweeps at most 2*r*v_max*dt of fresh
  // ground when d <= r, so R_area <= lambda (plus discretization slack).
  const TaskProfile mow = mow_profile();
  RewardParams params = default_reward_params(mow);
  WorldMap w = empty_world(4.8, 0.0375);
  CoverageGrid cov(w.spec);
  Pose pose{0.6, 2.4, 0.0};
  apply_coverage(cov, pose, mow, w);
  for (int step = 0; step < 20; ++step) {
    MotionResult r = integrate_motion(pose, {1.0, 0.0}, mow, w);
    pose = r.pose;
    CoverageUpdate up = apply_coverage(cov, pose, mow, w);
    REQUIRE(reward_area(up.a_new, params, mow) <= params.lambda_area * 1.05);
  }
}

TEST_CASE("closing a one-cell gap beats leaving it (incremental TV)") {
  const TaskProfile mow = mow_profile();
  RewardParams params = default_reward_params(mow);

  auto make_stripes = [] {
    CoverageGrid g(GridSpec(0.05, 40, 40));
    for (int x = 5; x < 35; ++x) {
      g.cells.at(x, 10) = 1;
      g.cells.at(x, 12) = 1;  // one-cell gap at y = 11
      g.covered_count += 2;
    }
    return g;
  };

  // Continuation A: sweep along the gap row, closing it cell by cell.
  CoverageGrid close = make_stripes();
  TvCounts v_close = tv_counts(close);
  double reward_close = 0.0;
  for (int x = 5; x < 35; ++x) {
    std::vector<Cell> batch{{x, 11}};
    close.cells.at(x, 11) = 1;
    ++close.covered_count;
    const TvCounts d = tv_delta(close, batch);
    const double v_prev = v_close.meters(close.spec.resolution);
    v_close += d;
    reward_close += reward_tv_incremental(v_close.meters(close.spec.resolution),
                                          v_prev, params, mow);
  }

  // Continuation B: cover the same number of fresh cells far away.
  CoverageGrid leave = make_stripes();
  TvCounts v_leave = tv_counts(leave);
  double reward_leave = 0.0;
  for (int x = 5; x < 35; ++x) {
    std::vector<Cell> batch{{x, 25}};
    leave.cells.at(x, 25) = 1;
    ++leave.covered_count;
    const TvCounts d = tv_delta(leave, batch);
    const double v_prev = v_leave.meters(leave.spec.resolution);
    v_leave += d;
    reward_leave += reward_tv_incremental(v_leave.meters(leave.spec.resolution),
                                          v_prev, params, mow);
  }

  CHECK(reward_close > reward_leave);
  CHECK(reward_close > 0.0);   // the gap row removes boundary
  CHECK(reward_leave < 0.0);   // the isolated strip adds boundary
}

TEST_CASE("check_termination: goal beats truncation, running otherwise") {
  EpisodeStatus status;
  status.goal_coverage = 0.99;
  status.tau = 1000;

  status.steps_since_new = 10;
  CHECK(check_termination(status, 0.991) == DoneReason::Goal);
  CHECK(check_termination(status, 0.5) == DoneReason::Running);

  status.steps_since_new = 1000;
  CHECK(check_termination(status, 0.5) == DoneReason::Truncated);
  CHECK(check_termination(status, 0.995) == DoneReason::Goal);
}
