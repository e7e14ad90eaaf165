// SPDX-License-Identifier: Apache-2.0
//
// Axis-aligned occupancy grid and shape rasterization.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "akplan/common.hpp"
#include "akplan/geometry/distance.hpp"
#include "akplan/geometry/shapes.hpp"

namespace akplan {

struct GridCell {
  int x{0};
  int y{0};

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// Workspace rectangle in world coordinates.
struct Bounds {
  Scalar x_min{0}, y_min{0}, x_max{0}, y_max{0};

  [[nodiscard]] Scalar width() const { return x_max - x_min; }
  [[nodiscard]] Scalar height() const { return y_max - y_min; }
};

/// Binary occupancy over an axis-aligned uniform grid.  Cells outside the
/// stored extent are reported occupied.
class OccupancyGrid {
 public:
  OccupancyGrid(const Vec2& origin, Scalar resolution, int width, int height)
      : origin_(origin), resolution_(resolution), width_(width), height_(height) {
    require(resolution > 0.0, ErrorKind::kConfig, "grid resolution must be > 0");
    require(width > 0 && height > 0, ErrorKind::kConfig,
            "grid must have positive extent");
    cells_.assign(static_cast<std::size_t>(width) * height, 0);
  }

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] Scalar resolution() const noexcept { return resolution_; }
  [[nodiscard]] const Vec2& origin() const noexcept { return origin_; }

  [[nodiscard]] bool inside(const GridCell& c) const noexcept {
    return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
  }

  /// Occupancy lookup; anything outside the grid counts as occupied.
  [[nodiscard]] bool occupied(const GridCell& c) const noexcept {
    if (!inside(c)) return true;
    return cells_[index(c)] != 0;
  }

  void set_occupied(const GridCell& c, bool value = true) {
    require(inside(c), ErrorKind::kConfig, "cell outside grid");
    cells_[index(c)] = value ? 1 : 0;
  }

  [[nodiscard]] Vec2 cell_center(const GridCell& c) const {
    return {origin_.x() + (c.x + 0.5) * resolution_,
            origin_.y() + (c.y + 0.5) * resolution_};
  }

  /// Cell containing a world point; points outside map to the nearest index
  /// outside the valid range and will read as occupied.
  [[nodiscard]] GridCell cell_of(const Vec2& p) const {
    return {static_cast<int>(std::floor((p.x() - origin_.x()) / resolution_)),
            static_cast<int>(std::floor((p.y() - origin_.y()) / resolution_))};
  }

  [[nodiscard]] std::size_t occupied_count() const {
    std::size_t n = 0;
    for (auto v : cells_) n += v;
    return n;
  }

  [[nodiscard]] std::size_t index(const GridCell& c) const noexcept {
    return static_cast<std::size_t>(c.y) * width_ + c.x;
  }

 private:
  Vec2 origin_;  // world position of the (0, 0) cell corner
  Scalar resolution_;
  int width_, height_;
  std::vector<std::uint8_t> cells_;
};

/// Rasterize placed shapes into an occupancy grid over `bounds`.  A cell is
/// occupied iff its center lies within `inflation` of any shape (boundary
/// inclusive); `inflation` is typically the robot footprint's circumscribed
/// radius so that the grid can be searched as a point robot.
inline OccupancyGrid rasterize(std::span<const PlacedShape> shapes,
                               const Bounds& bounds, Scalar resolution,
                               Scalar inflation) {
  require(inflation >= 0.0, ErrorKind::kConfig, "inflation must be >= 0");
  require(bounds.width() > 0.0 && bounds.height() > 0.0, ErrorKind::kConfig,
          "bounds must have positive area");
  const int w = static_cast<int>(std::ceil(bounds.width() / resolution - 1e-9));
  const int h = static_cast<int>(std::ceil(bounds.height() / resolution - 1e-9));
  OccupancyGrid grid({bounds.x_min, bounds.y_min}, resolution, w, h);

  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      const GridCell c{ix, iy};
      const Vec2 p = grid.cell_center(c);
      for (const PlacedShape& s : shapes) {
        // Cheap reject on the bounding disc before the exact test.
        const Scalar center_dist = (p - s.pose.translation()).norm();
        if (center_dist > s.shape.bounding_radius() + inflation) continue;
        if (point_signed_distance(p, s.shape, s.pose) <= inflation) {
          grid.set_occupied(c);
          break;
        }
      }
    }
  }
  return grid;
}

}  // namespace akplan
