#pragma once

#include <Eigen/Dense>

#include "covpath/world.hpp"

namespace covpath {

// Distance along the ray to the boundary of the first obstacle cell, or
// max_range if none is hit within range. Grid traversal visits every cell
// the ray passes through. An origin inside an obstacle cell yields 0.
double cast_ray(const WorldMap& world, const Eigen::Vector2d& origin, double angle,
                double max_range);

// True if the segment from a to b crosses no obstacle cell (the endpoint
// cell itself is not tested).
bool line_of_sight(const WorldMap& world, const Eigen::Vector2d& a,
                   const Eigen::Vector2d& b);

// True if a disk of the given radius centered at p overlaps any obstacle
// cell. Points outside the grid count as obstacle.
bool disk_collides(const WorldMap& world, const Eigen::Vector2d& p, double radius);

// One range measurement per ray; Gaussian range noise is added and the
// result clamped to [0, lidar_range]. Rays are cast from the true pose.
LidarScan simulate_lidar(const WorldMap& world, const Pose& pose,
                         const TaskProfile& profile, const NoiseModel& noise,
                         Rng& rng);

inline LidarScan simulate_lidar(const WorldMap& world, const Pose& pose,
                                const TaskProfile& profile) {
  Rng rng(0, rng_stream::kDynamicsNoise);
  return simulate_lidar(world, pose, profile, NoiseModel{}, rng);
}

struct MotionResult {
  Pose pose;
  bool collided = false;
  double distance = 0.0;  // total applied translation, meters
};

// Unicycle forward-Euler integration over dt in K equal substeps. A substep
// whose translation would overlap an obstacle keeps the rotation and drops
// the translation, raising the collided flag.
MotionResult integrate_motion(const Pose& pose, const Action& action,
                              const TaskProfile& profile, const WorldMap& world,
                              int substeps = 5);

// Gaussian offsets on position and heading; feeds mapping and observation
// only, never the ground-truth dynamics.
Pose perturb_pose(const Pose& pose, const NoiseModel& noise, Rng& rng);

}  // namespace covpath
