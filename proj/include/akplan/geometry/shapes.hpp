// SPDX-License-Identifier: Apache-2.0
//
// Convex collision primitives: circles and counter-clockwise convex polygons.
#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "akplan/common.hpp"
#include "akplan/geometry/pose2.hpp"

namespace akplan {

/// A convex shape expressed in its own local frame.  Circles are centered at
/// the local origin; polygons store counter-clockwise vertices.
class ConvexShape {
 public:
  enum class Kind { kCircle, kPolygon };

  static ConvexShape circle(Scalar radius) {
    require(radius > 0.0, ErrorKind::kInvalidShape, "circle radius must be > 0");
    ConvexShape s;
    s.kind_ = Kind::kCircle;
    s.radius_ = radius;
    s.bounding_radius_ = radius;
    return s;
  }

  static ConvexShape polygon(std::vector<Vec2> vertices) {
    const auto n = vertices.size();
    require(n >= 3, ErrorKind::kInvalidShape, "polygon needs at least 3 vertices");
    // Strict convexity and counter-clockwise winding: every consecutive edge
    // pair must turn left.
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = vertices[i];
      const Vec2& b = vertices[(i + 1) % n];
      const Vec2& c = vertices[(i + 2) % n];
      const Scalar cross =
          (b.x() - a.x()) * (c.y() - b.y()) - (b.y() - a.y()) * (c.x() - b.x());
      require(cross > 1e-12, ErrorKind::kInvalidShape,
              "polygon must be strictly convex with counter-clockwise winding");
    }
    ConvexShape s;
    s.kind_ = Kind::kPolygon;
    s.vertices_ = std::move(vertices);
    Scalar r2 = 0.0;
    for (const Vec2& v : s.vertices_) r2 = std::max(r2, v.squaredNorm());
    s.bounding_radius_ = std::sqrt(r2);
    return s;
  }

  /// Axis-aligned rectangle helper (center at the local origin).
  static ConvexShape box(Scalar size_x, Scalar size_y) {
    const Scalar hx = size_x / 2.0, hy = size_y / 2.0;
    return polygon({{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}});
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] bool is_circle() const noexcept { return kind_ == Kind::kCircle; }
  [[nodiscard]] Scalar radius() const noexcept { return radius_; }
  [[nodiscard]] const std::vector<Vec2>& vertices() const noexcept {
    return vertices_;
  }

  /// Farthest point of the shape along `dir` (local frame, dir need not be
  /// normalized).
  [[nodiscard]] Vec2 support(const Vec2& dir) const {
    if (kind_ == Kind::kCircle) {
      const Scalar n = dir.norm();
      if (n < 1e-300) return {radius_, 0.0};
      return dir * (radius_ / n);
    }
    const Vec2* best = &vertices_[0];
    Scalar best_dot = best->dot(dir);
    for (const Vec2& v : vertices_) {
      const Scalar d = v.dot(dir);
      if (d > best_dot) {
        best_dot = d;
        best = &v;
      }
    }
    return *best;
  }

  /// Radius of the smallest origin-centered disc containing the shape.
  [[nodiscard]] Scalar bounding_radius() const noexcept { return bounding_radius_; }

 private:
  ConvexShape() = default;

  Kind kind_{Kind::kCircle};
  Scalar radius_{0};
  Scalar bounding_radius_{0};
  std::vector<Vec2> vertices_;
};

/// A shape placed in the world.
struct PlacedShape {
  ConvexShape shape;
  Pose2 pose;
};

}  // namespace akplan
