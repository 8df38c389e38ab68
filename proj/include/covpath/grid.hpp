#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace covpath {

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Geometry of a 2D grid: metric resolution, cell counts and the world
// coordinates of the lower-left corner of cell (0,0). World y points up;
// cell (0,0) is the lower-left cell.
struct GridSpec {
  double resolution = 0.0375;  // meters per cell
  int width = 1;               // cells along x
  int height = 1;              // cells along y
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();

  GridSpec() = default;
  GridSpec(double res, int w, int h, Eigen::Vector2d org = Eigen::Vector2d::Zero())
      : resolution(res), width(w), height(h), origin(std::move(org)) {
    if (!(resolution > 0.0) || width < 1 || height < 1)
      throw std::invalid_argument("GridSpec: resolution must be > 0 and dims >= 1");
  }

  static GridSpec from_extent(double side_x, double side_y, double res,
                              Eigen::Vector2d org = Eigen::Vector2d::Zero()) {
    return GridSpec(res, static_cast<int>(std::lround(side_x / res)),
                    static_cast<int>(std::lround(side_y / res)), std::move(org));
  }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  }
  bool in_bounds(const Eigen::Vector2d& p) const {
    return p.x() >= origin.x() && p.x() < origin.x() + width * resolution &&
           p.y() >= origin.y() && p.y() < origin.y() + height * resolution;
  }

  Cell cell_of(const Eigen::Vector2d& p) const {
    return Cell{static_cast<int>(std::floor((p.x() - origin.x()) / resolution)),
                static_cast<int>(std::floor((p.y() - origin.y()) / resolution))};
  }

  Eigen::Vector2d center_of(Cell c) const {
    return origin + Eigen::Vector2d((c.x + 0.5) * resolution, (c.y + 0.5) * resolution);
  }
  Eigen::Vector2d corner_of(Cell c) const {  // lower-left corner
    return origin + Eigen::Vector2d(c.x * resolution, c.y * resolution);
  }

  double side_x() const { return width * resolution; }
  double side_y() const { return height * resolution; }
  double cell_area() const { return resolution * resolution; }
  std::int64_t cell_count() const {
    return static_cast<std::int64_t>(width) * height;
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.resolution == b.resolution && a.width == b.width &&
           a.height == b.height && a.origin == b.origin;
  }
};

// Dense grid of T, Eigen-backed. Storage is column-major with x as the
// fast index: data(x, y).
template <typename T>
struct Grid {
  using Data = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic>;

  GridSpec spec;
  Data cells;

  Grid() = default;
  explicit Grid(const GridSpec& s, T fill = T{})
      : spec(s), cells(Data::Constant(s.width, s.height, fill)) {}

  T& at(Cell c) { return cells(c.x, c.y); }
  T at(Cell c) const { return cells(c.x, c.y); }
  T& at(int x, int y) { return cells(x, y); }
  T at(int x, int y) const { return cells(x, y); }

  // Out-of-bounds reads as `outside`.
  T at_or(Cell c, T outside) const {
    return spec.in_bounds(c) ? cells(c.x, c.y) : outside;
  }

  void fill(T v) { cells.setConstant(v); }
};

inline double wrap_angle(double a) {
  // Normalize to (-pi, pi].
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

}  // namespace covpath
