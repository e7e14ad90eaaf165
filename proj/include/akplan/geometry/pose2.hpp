// SPDX-License-Identifier: Apache-2.0
//
// Planar rigid transforms.  Pose2 is the SE(2) element used for link frames,
// obstacle placement, and anchors; the heading is always stored wrapped to
// (-pi, pi].
#pragma once

#include <cmath>

#include "akplan/common.hpp"

namespace akplan {

/// Wrap an angle to (-pi, pi].
inline Scalar wrap_angle(Scalar a) {
  Scalar w = std::remainder(a, 2.0 * kPi);  // in [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

/// Shortest signed angular difference a - b, wrapped to (-pi, pi].
inline Scalar angle_diff(Scalar a, Scalar b) { return wrap_angle(a - b); }

struct Pose2 {
  Scalar x{0};
  Scalar y{0};
  Scalar theta{0};

  Pose2() = default;
  Pose2(Scalar px, Scalar py, Scalar ptheta)
      : x(px), y(py), theta(wrap_angle(ptheta)) {}

  static Pose2 identity() { return {}; }

  [[nodiscard]] Vec2 translation() const { return {x, y}; }

  /// Rotate a direction by this pose's heading (no translation).
  [[nodiscard]] Vec2 rotate(const Vec2& v) const {
    const Scalar c = std::cos(theta), s = std::sin(theta);
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
  }

  /// Map a point expressed in this frame into the parent frame.
  [[nodiscard]] Vec2 apply(const Vec2& p) const {
    const Vec2 r = rotate(p);
    return {r.x() + x, r.y() + y};
  }

  /// Group composition: (this ∘ other) maps other's frame through this one.
  [[nodiscard]] Pose2 compose(const Pose2& other) const {
    const Vec2 t = apply({other.x, other.y});
    return {t.x(), t.y(), theta + other.theta};
  }

  [[nodiscard]] Pose2 inverse() const {
    const Scalar c = std::cos(theta), s = std::sin(theta);
    return {-(c * x + s * y), -(-s * x + c * y), -theta};
  }

  friend Pose2 operator*(const Pose2& a, const Pose2& b) { return a.compose(b); }
};

/// Componentwise pose difference a - b as (dx, dy, wrapped dtheta).
inline Vec3 pose_delta(const Pose2& a, const Pose2& b) {
  return {a.x - b.x, a.y - b.y, angle_diff(a.theta, b.theta)};
}

}  // namespace akplan
