#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "covpath/pyramid.hpp"
#include "covpath/world.hpp"

namespace covpath {

enum class Reducer { Mean, Max };

// One egocentric map stack: `scales` grids of grid_size x grid_size values
// in [0,1], finest first, agent centered, heading up. Stored flat per scale
// in row-major image order (row 0 = top of the egocentric view).
struct MultiScaleStack {
  int scales = 0;
  int grid_size = 0;
  std::vector<Eigen::ArrayXXf> maps;  // maps[i](row, col)

  MultiScaleStack() = default;
  MultiScaleStack(int m, int g)
      : scales(m), grid_size(g), maps(m, Eigen::ArrayXXf::Zero(g, g)) {}
};

// Full policy input. `maps` is the flat channel-major layout used for
// serialization and the network input: coverage scales 1..m, obstacle
// 1..m, frontier 1..m, each grid row-major, then the lidar vector.
struct Observation {
  int scales = 0;
  int grid_size = 0;
  int lidar_rays = 0;
  Eigen::VectorXf maps;   // 3 * m * g^2 values in [0,1]
  Eigen::VectorXf lidar;  // lidar_rays values in [0,1]

  int channel_cells() const { return grid_size * grid_size; }
  int map_values() const { return 3 * scales * channel_cells(); }
  int flat_size() const { return map_values() + lidar_rays; }

  // kind: 0 coverage, 1 obstacle, 2 frontier.
  float map_at(int kind, int scale_index, int row, int col) const {
    const int ch = kind * scales + (scale_index - 1);
    return maps[ch * channel_cells() + row * grid_size + col];
  }
  Eigen::VectorXf flat() const {
    Eigen::VectorXf out(flat_size());
    out.head(maps.size()) = maps;
    out.tail(lidar.size()) = lidar;
    return out;
  }
};

// Maps a world point into egocentric pixel coordinates of one scale.
// Returns false when the point falls outside the scale's crop.
bool egocentric_pixel(const Eigen::Vector2d& point, const Pose& pose,
                      int scale_index, const EncoderConfig& config, int& row,
                      int& col);

// Reference extraction: output pixel (row, col) covers a square of side
// d_i/grid_size in the agent frame; its value is the reducer over all fine
// cells whose centers fall in that square after rotating by (theta - pi/2)
// about the agent. Cells beyond the allocated world contribute 0. Exact but
// O(d_i^2); the production path samples the pooled pyramid instead.
Eigen::ArrayXXf extract_egocentric(const Grid<std::uint8_t>& global_grid,
                                   const Pose& pose, int scale_index,
                                   const EncoderConfig& config, Reducer reducer);

// Production extraction: nearest-cell sampling of the matching pyramid
// level at each output pixel center. Agrees with extract_egocentric for
// axis-aligned poses aligned to coarse-cell corners.
Eigen::ArrayXXf sample_egocentric(const PooledPyramid& pyramid,
                                  const Grid<std::uint8_t>& fine, const Pose& pose,
                                  int scale_index, const EncoderConfig& config);

// Inputs for observation construction; the pyramids must be current.
struct ObservationSources {
  const PooledPyramid* coverage_pyramid = nullptr;
  const Grid<std::uint8_t>* coverage_fine = nullptr;
  const PooledPyramid* obstacle_pyramid = nullptr;
  const Grid<std::uint8_t>* obstacle_fine = nullptr;
  std::span<const Cell> frontier_cells;  // current fine frontier points
};

// Builds M_c and M_o by pyramid sampling and M_f by forward-mapping every
// fine frontier point into each scale (frontier existence survives rotation
// exactly). S is the scan normalized by the lidar range.
Observation build_observation(const ObservationSources& sources, const Pose& pose,
                              const LidarScan& scan, const TaskProfile& profile,
                              const EncoderConfig& config);

}  // namespace covpath
