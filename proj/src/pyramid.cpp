#include "covpath/pyramid.hpp"

#include <stdexcept>

namespace covpath {

PooledPyramid::PooledPyramid(const GridSpec& fine_spec, const EncoderConfig& config,
                             Kind kind)
    : fine_spec_(fine_spec), config_(config), kind_(kind) {
  config_.validate();
  for (int level = 2; level <= config_.scales; ++level) {
    const int f = config_.reduction(level);
    const int w = (fine_spec_.width + f - 1) / f;
    const int h = (fine_spec_.height + f - 1) / f;
    if (kind_ == Kind::Mean) {
      mean_levels_.emplace_back(Eigen::ArrayXXd::Zero(w, h));
    } else {
      count_levels_.emplace_back(
          Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(w, h));
    }
    inv_block_area_.push_back(1.0 / (static_cast<double>(f) * f));
  }
}

GridSpec PooledPyramid::level_spec(int scale_index) const {
  const int f = config_.reduction(scale_index);
  const int w = (fine_spec_.width + f - 1) / f;
  const int h = (fine_spec_.height + f - 1) / f;
  return GridSpec(fine_spec_.resolution * f, w, h, fine_spec_.origin);
}

void PooledPyramid::rebuild(const Grid<std::uint8_t>& fine) {
  for (int level = 2; level <= config_.scales; ++level) {
    const int f = config_.reduction(level);
    const int idx = level - 2;
    auto accumulate = [&](auto& target, auto value_of) {
      target.setZero();
      for (int y = 0; y < fine_spec_.height; ++y)
        for (int x = 0; x < fine_spec_.width; ++x)
          if (fine.at(x, y)) target(x / f, y / f) += value_of();
    };
    if (kind_ == Kind::Mean) {
      const double unit = inv_block_area_[idx];
      accumulate(mean_levels_[idx], [&] { return unit; });
    } else {
      accumulate(count_levels_[idx], [] { return std::int64_t{1}; });
    }
  }
}

void PooledPyramid::apply_delta(Cell fine_cell, int delta) {
  for (int level = 2; level <= config_.scales; ++level) {
    const int f = config_.reduction(level);
    const int idx = level - 2;
    const int cx = fine_cell.x / f;
    const int cy = fine_cell.y / f;
    if (kind_ == Kind::Mean) {
      mean_levels_[idx](cx, cy) += delta * inv_block_area_[idx];
    } else {
      count_levels_[idx](cx, cy) += delta;
    }
  }
}

double PooledPyramid::level_value(int scale_index, Cell c) const {
  if (scale_index < 2 || scale_index > config_.scales)
    throw std::out_of_range("PooledPyramid::level_value: bad scale index");
  const int idx = scale_index - 2;
  if (kind_ == Kind::Mean) {
    const auto& lv = mean_levels_[idx];
    if (c.x < 0 || c.y < 0 || c.x >= lv.rows() || c.y >= lv.cols()) return 0.0;
    return lv(c.x, c.y);
  }
  const auto& lv = count_levels_[idx];
  if (c.x < 0 || c.y < 0 || c.x >= lv.rows() || c.y >= lv.cols()) return 0.0;
  return lv(c.x, c.y) > 0 ? 1.0 : 0.0;
}

std::int64_t PooledPyramid::level_count(int scale_index, Cell c) const {
  if (kind_ != Kind::Count)
    throw std::logic_error("PooledPyramid::level_count: not a count pyramid");
  if (scale_index == 1) throw std::out_of_range("level 1 counts live in the fine grid");
  const auto& lv = count_levels_[scale_index - 2];
  if (c.x < 0 || c.y < 0 || c.x >= lv.rows() || c.y >= lv.cols()) return 0;
  return lv(c.x, c.y);
}

double PooledPyramid::value_at(int scale_index, const Eigen::Vector2d& p,
                               const Grid<std::uint8_t>& fine) const {
  const int f = config_.reduction(scale_index);
  const double res = fine_spec_.resolution * f;
  const int cx = static_cast<int>(std::floor((p.x() - fine_spec_.origin.x()) / res));
  const int cy = static_cast<int>(std::floor((p.y() - fine_spec_.origin.y()) / res));
  if (scale_index == 1) {
    if (cx < 0 || cy < 0 || cx >= fine_spec_.width || cy >= fine_spec_.height) return 0.0;
    return fine.at(cx, cy) ? 1.0 : 0.0;
  }
  return level_value(scale_index, Cell{cx, cy});
}

}  // namespace covpath
