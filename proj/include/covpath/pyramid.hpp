#pragma once

#include <Eigen/Dense>
#include <vector>

#include "covpath/grid.hpp"

namespace covpath {

// Multi-scale observation geometry. Scale i (1-based) crops a square of
// side grid_size * fine_resolution * s^(i-1) around the agent.
struct EncoderConfig {
  int scales = 4;                  // m
  int scale_factor = 4;            // s
  int grid_size = 32;              // cells per side, w = h
  double fine_resolution = 0.0375; // m per cell at scale 1

  double scale_side(int scale_index) const {  // d_i, meters
    double side = grid_size * fine_resolution;
    for (int i = 1; i < scale_index; ++i) side *= scale_factor;
    return side;
  }
  int reduction(int scale_index) const {  // s^(i-1)
    int f = 1;
    for (int i = 1; i < scale_index; ++i) f *= scale_factor;
    return f;
  }
  void validate() const {
    if (scales < 1 || scale_factor < 2 || grid_size < 1 || !(fine_resolution > 0))
      throw std::invalid_argument("EncoderConfig: need m>=1, s>=2, grid_size>=1, res>0");
  }
};

// Axis-aligned reductions of one global binary grid, one level per scale.
// Level l aggregates blocks of s^(l-1) x s^(l-1) fine cells: mean levels
// store mean occupancy (missing cells past the world edge count as 0),
// count levels store how many set fine cells the block contains. Level 1
// is the fine grid itself and is read from the source grid on demand.
class PooledPyramid {
 public:
  enum class Kind { Mean, Count };

  PooledPyramid() = default;
  PooledPyramid(const GridSpec& fine_spec, const EncoderConfig& config, Kind kind);

  // Rebuilds every level from the fine grid.
  void rebuild(const Grid<std::uint8_t>& fine);

  // Incremental adjustment for one fine cell whose value changed by
  // delta (+1 or -1). Cost is O(m), independent of the world size.
  void apply_delta(Cell fine_cell, int delta);

  // Value of level `scale_index` at coarse cell c; out of range reads 0.
  // For level 1 the caller samples the fine grid directly via value_at.
  double level_value(int scale_index, Cell c) const;

  // Convenience: value at the level cell containing world point p, with the
  // fine grid supplied for level 1 lookups.
  double value_at(int scale_index, const Eigen::Vector2d& p,
                  const Grid<std::uint8_t>& fine) const;

  std::int64_t level_count(int scale_index, Cell c) const;  // Count pyramids

  int levels() const { return config_.scales; }
  const GridSpec& fine_spec() const { return fine_spec_; }
  GridSpec level_spec(int scale_index) const;

 private:
  GridSpec fine_spec_;
  EncoderConfig config_;
  Kind kind_ = Kind::Mean;
  // Levels 2..m; level l at index l-2. Means in double so that 1e4-scale
  // incremental update streams stay within 1e-9 of a full recompute.
  std::vector<Eigen::ArrayXXd> mean_levels_;
  std::vector<Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>> count_levels_;
  std::vector<double> inv_block_area_;  // 1 / (s^(l-1))^2
};

}  // namespace covpath
