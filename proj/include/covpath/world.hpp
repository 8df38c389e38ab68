#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "covpath/grid.hpp"
#include "covpath/rng.hpp"

namespace covpath {

enum class CellState : std::uint8_t { Free = 0, Obstacle = 1 };

// Ground-truth binary occupancy. Boundary cells are obstacles (confined
// area); make_bounded() enforces this after construction or edits.
struct WorldMap {
  GridSpec spec;
  Grid<std::uint8_t> cells;  // 0 = free, 1 = obstacle

  WorldMap() = default;
  explicit WorldMap(const GridSpec& s) : spec(s), cells(s, 0) {}

  bool is_obstacle(Cell c) const { return cells.at_or(c, 1) != 0; }
  bool is_free(Cell c) const { return !is_obstacle(c); }
  void set_obstacle(Cell c) { cells.at(c) = 1; }

  void make_bounded() {
    cells.cells.row(0).setConstant(1);
    cells.cells.row(spec.width - 1).setConstant(1);
    cells.cells.col(0).setConstant(1);
    cells.cells.col(spec.height - 1).setConstant(1);
  }

  bool is_bounded() const {
    return (cells.cells.row(0) != 0).all() && (cells.cells.row(spec.width - 1) != 0).all() &&
           (cells.cells.col(0) != 0).all() && (cells.cells.col(spec.height - 1) != 0).all();
  }
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, CCW from +x, normalized to (-pi, pi]

  Eigen::Vector2d position() const { return {x, y}; }
  Eigen::Vector2d heading() const { return {std::cos(theta), std::sin(theta)}; }
};

// Normalized control input; components live in [-1, 1].
struct Action {
  double v_norm = 0.0;
  double omega_norm = 0.0;

  Action clamped() const {
    auto clamp1 = [](double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); };
    return {clamp1(v_norm), clamp1(omega_norm)};
  }
};

// Physical dimensions of one CPP variation.
struct TaskProfile {
  std::string name;
  double coverage_radius = 0.15;  // d, meters
  double agent_radius = 0.15;     // r, meters
  double v_max = 0.26;            // m/s
  double omega_max = 1.0;         // rad/s
  double dt = 0.5;                // s
  int lidar_rays = 24;
  double lidar_range = 3.5;       // m
  double lidar_fov = M_PI;        // radians
  double coverage_fov = M_PI;     // radians; equals lidar_fov unless overridden

  void validate() const {
    if (!(coverage_radius > 0 && agent_radius > 0 && v_max > 0 && omega_max > 0 &&
          dt > 0 && lidar_rays > 0 && lidar_range > 0))
      throw std::invalid_argument("TaskProfile: all physical quantities must be positive");
    if (!(lidar_fov > 0 && lidar_fov <= 2.0 * M_PI + 1e-12))
      throw std::invalid_argument("TaskProfile: lidar_fov must be in (0, 2*pi]");
  }
};

inline TaskProfile explore_omni_profile() {
  return {"explore-omni", 7.0, 0.08, 0.5, 1.0, 0.5, 20, 7.0, 2.0 * M_PI, 2.0 * M_PI};
}
inline TaskProfile explore_dir_profile() {
  return {"explore-dir", 3.5, 0.15, 0.26, 1.0, 0.5, 24, 3.5, M_PI, M_PI};
}
inline TaskProfile mow_profile() {
  return {"mow", 0.15, 0.15, 0.26, 1.0, 0.5, 24, 3.5, M_PI, M_PI};
}

inline TaskProfile profile_by_name(const std::string& name) {
  if (name == "explore-omni") return explore_omni_profile();
  if (name == "explore-dir") return explore_dir_profile();
  if (name == "mow") return mow_profile();
  throw std::invalid_argument("unknown profile: " + name);
}

// Gaussian observation noise on pose and lidar ranges. Identical seeds
// give identical noise sequences.
struct NoiseModel {
  double sigma_pos = 0.0;      // m, applied to x and y independently
  double sigma_heading = 0.0;  // rad
  double sigma_lidar = 0.0;    // m, per ray
  std::uint64_t seed = 0;

  bool enabled() const { return sigma_pos > 0 || sigma_heading > 0 || sigma_lidar > 0; }
};

// Noise levels 1-3 match the evaluated (position, heading, lidar) sigmas;
// level 0 is noise-free.
inline NoiseModel noise_level(int level, std::uint64_t seed = 0) {
  switch (level) {
    case 0: return {0.0, 0.0, 0.0, seed};
    case 1: return {0.01, 0.05, 0.05, seed};
    case 2: return {0.02, 0.1, 0.1, seed};
    case 3: return {0.05, 0.2, 0.2, seed};
    default: throw std::invalid_argument("noise level must be 0..3");
  }
}

struct LidarScan {
  std::vector<double> ranges;  // meters, clamped to [0, lidar_range]
};

// Ray angles relative to heading: spread across the fov, centered on the
// heading. A full 2*pi fov spaces rays fov/n apart so the seam ray is not
// duplicated.
inline double lidar_ray_angle(const TaskProfile& p, int k) {
  const bool full_circle = p.lidar_fov >= 2.0 * M_PI - 1e-9;
  if (full_circle) return p.lidar_fov * (static_cast<double>(k) / p.lidar_rays - 0.5);
  if (p.lidar_rays == 1) return 0.0;
  return p.lidar_fov * (static_cast<double>(k) / (p.lidar_rays - 1) - 0.5);
}

}  // namespace covpath
