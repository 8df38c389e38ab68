#include "covpath/obs.hpp"

#include <algorithm>
#include <cmath>

namespace covpath {

namespace {

struct Frame {
  Eigen::Vector2d pos;
  Eigen::Vector2d right;    // agent-frame +x in world coordinates
  Eigen::Vector2d forward;  // agent-frame +y (heading) in world coordinates

  // Built from the rotation angle (theta - pi/2) so the no-rotation pose
  // theta = pi/2 maps agent axes onto world axes exactly.
  explicit Frame(const Pose& pose) : pos(pose.position()) {
    const double c = std::cos(pose.theta - M_PI / 2.0);
    const double s = std::sin(pose.theta - M_PI / 2.0);
    right = {c, s};
    forward = {-s, c};
  }

  Eigen::Vector2d to_agent(const Eigen::Vector2d& world) const {
    const Eigen::Vector2d d = world - pos;
    return {d.dot(right), d.dot(forward)};
  }
  Eigen::Vector2d to_world(const Eigen::Vector2d& agent) const {
    return pos + agent.x() * right + agent.y() * forward;
  }
};

}  // namespace

bool egocentric_pixel(const Eigen::Vector2d& point, const Pose& pose,
                      int scale_index, const EncoderConfig& config, int& row,
                      int& col) {
  const Frame frame(pose);
  const Eigen::Vector2d a = frame.to_agent(point);
  const double cell = config.scale_side(scale_index) / config.grid_size;
  const double half = config.grid_size / 2.0;
  col = static_cast<int>(std::floor(half + a.x() / cell));
  row = static_cast<int>(std::floor(half - a.y() / cell));
  return col >= 0 && col < config.grid_size && row >= 0 && row < config.grid_size;
}

Eigen::ArrayXXf extract_egocentric(const Grid<std::uint8_t>& global_grid,
                                   const Pose& pose, int scale_index,
                                   const EncoderConfig& config, Reducer reducer) {
  config.validate();
  const int g = config.grid_size;
  const Frame frame(pose);
  const double cell = config.scale_side(scale_index) / g;
  const double half = g / 2.0;
  const GridSpec& spec = global_grid.spec;
  const double res = spec.resolution;

  Eigen::ArrayXXf out = Eigen::ArrayXXf::Zero(g, g);
  for (int row = 0; row < g; ++row) {
    for (int col = 0; col < g; ++col) {
      // Pixel square in the agent frame; x half-open right, y half-open up,
      // matching egocentric_pixel's floor convention.
      const double x_lo = (col - half) * cell;
      const double x_hi = x_lo + cell;
      const double y_hi = (half - row) * cell;
      const double y_lo = y_hi - cell;

      const Eigen::Vector2d corners[4] = {
          frame.to_world({x_lo, y_lo}), frame.to_world({x_hi, y_lo}),
          frame.to_world({x_lo, y_hi}), frame.to_world({x_hi, y_hi})};
      double wx_lo = corners[0].x(), wx_hi = corners[0].x();
      double wy_lo = corners[0].y(), wy_hi = corners[0].y();
      for (const auto& c : corners) {
        wx_lo = std::min(wx_lo, c.x());
        wx_hi = std::max(wx_hi, c.x());
        wy_lo = std::min(wy_lo, c.y());
        wy_hi = std::max(wy_hi, c.y());
      }

      // Scan the unclipped index range so lattice cells beyond the world
      // edge still enter the mean denominator with value 0.
      const int ix_lo = static_cast<int>(std::floor((wx_lo - spec.origin.x()) / res - 0.5));
      const int ix_hi = static_cast<int>(std::ceil((wx_hi - spec.origin.x()) / res - 0.5));
      const int iy_lo = static_cast<int>(std::floor((wy_lo - spec.origin.y()) / res - 0.5));
      const int iy_hi = static_cast<int>(std::ceil((wy_hi - spec.origin.y()) / res - 0.5));

      double sum = 0.0;
      std::int64_t count = 0;
      double maxv = 0.0;
      for (int iy = iy_lo; iy <= iy_hi; ++iy) {
        for (int ix = ix_lo; ix <= ix_hi; ++ix) {
          const Eigen::Vector2d center =
              spec.origin + Eigen::Vector2d((ix + 0.5) * res, (iy + 0.5) * res);
          const Eigen::Vector2d a = frame.to_agent(center);
          if (a.x() < x_lo || a.x() >= x_hi) continue;
          if (a.y() <= y_lo || a.y() > y_hi) continue;
          ++count;
          const double v = global_grid.at_or(Cell{ix, iy}, 0) ? 1.0 : 0.0;
          sum += v;
          maxv = std::max(maxv, v);
        }
      }
      if (reducer == Reducer::Mean) {
        out(row, col) = count > 0 ? static_cast<float>(sum / count) : 0.0f;
      } else {
        out(row, col) = static_cast<float>(maxv);
      }
    }
  }
  return out;
}

Eigen::ArrayXXf sample_egocentric(const PooledPyramid& pyramid,
                                  const Grid<std::uint8_t>& fine, const Pose& pose,
                                  int scale_index, const EncoderConfig& config) {
  const int g = config.grid_size;
  const Frame frame(pose);
  const double cell = config.scale_side(scale_index) / g;
  const double half = g / 2.0;

  Eigen::ArrayXXf out(g, g);
  for (int row = 0; row < g; ++row) {
    const double y_a = (half - row - 0.5) * cell;
    for (int col = 0; col < g; ++col) {
      const double x_a = (col + 0.5 - half) * cell;
      const Eigen::Vector2d w = frame.to_world({x_a, y_a});
      out(row, col) = static_cast<float>(pyramid.value_at(scale_index, w, fine));
    }
  }
  return out;
}

Observation build_observation(const ObservationSources& sources, const Pose& pose,
                              const LidarScan& scan, const TaskProfile& profile,
                              const EncoderConfig& config) {
  const int g = config.grid_size;
  const int m = config.scales;
  const int cells = g * g;

  Observation obs;
  obs.scales = m;
  obs.grid_size = g;
  obs.lidar_rays = profile.lidar_rays;
  obs.maps = Eigen::VectorXf::Zero(3 * m * cells);

  auto write_channel = [&](int kind, int scale_index, const Eigen::ArrayXXf& img) {
    float* dst = obs.maps.data() + (kind * m + scale_index - 1) * cells;
    for (int row = 0; row < g; ++row)
      for (int col = 0; col < g; ++col) dst[row * g + col] = img(row, col);
  };

  for (int i = 1; i <= m; ++i) {
    write_channel(0, i, sample_egocentric(*sources.coverage_pyramid,
                                          *sources.coverage_fine, pose, i, config));
    write_channel(1, i, sample_egocentric(*sources.obstacle_pyramid,
                                          *sources.obstacle_fine, pose, i, config));
  }

  // Frontier channels: forward-map every fine frontier point so existence
  // persists through scales under arbitrary rotation.
  const GridSpec& fine_spec = sources.coverage_fine->spec;
  for (const Cell& fc : sources.frontier_cells) {
    const Eigen::Vector2d center = fine_spec.center_of(fc);
    for (int i = 1; i <= m; ++i) {
      int row, col;
      if (egocentric_pixel(center, pose, i, config, row, col)) {
        obs.maps[(2 * m + i - 1) * cells + row * g + col] = 1.0f;
      }
    }
  }

  obs.lidar = Eigen::VectorXf(profile.lidar_rays);
  for (int k = 0; k < profile.lidar_rays; ++k)
    obs.lidar[k] = static_cast<float>(
        std::clamp(scan.ranges[k] / profile.lidar_range, 0.0, 1.0));
  return obs;
}

}  // namespace covpath
