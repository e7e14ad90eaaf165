// SPDX-License-Identifier: Apache-2.0
//
// Signed distance between placed convex shapes.
//
// Positive values are the Euclidean separation, negative values the
// penetration depth (the smallest translation that separates the pair).
// Separation is computed with a support-function GJK walk on the Minkowski
// difference; penetration falls back to exact per-kind formulas (circle
// algebra, separating-axis overlap for polygon pairs).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "akplan/common.hpp"
#include "akplan/geometry/pose2.hpp"
#include "akplan/geometry/shapes.hpp"

namespace akplan {

namespace detail {

inline Scalar cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

inline Scalar point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 < 1e-300) return (p - a).norm();
  const Scalar t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

inline std::vector<Vec2> world_vertices(const ConvexShape& s, const Pose2& pose) {
  std::vector<Vec2> out;
  out.reserve(s.vertices().size());
  for (const Vec2& v : s.vertices()) out.push_back(pose.apply(v));
  return out;
}

/// Closest point to the origin on segment [a, b].
inline Vec2 segment_closest_to_origin(const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 < 1e-300) return a;
  const Scalar t = std::clamp(-a.dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

/// GJK distance between two convex support functions, assuming the shapes do
/// not overlap more than marginally.  Returns 0 when an enclosing simplex of
/// the origin is found.
template <typename SupportFn>
Scalar gjk_distance(const SupportFn& support) {
  // Simplex of at most 2 points (closest-feature tracking in 2D).
  std::array<Vec2, 3> simplex;
  int n = 0;

  Vec2 dir(1.0, 0.0);
  Vec2 v = support(dir);  // arbitrary first vertex
  simplex[n++] = v;
  Vec2 closest = v;

  constexpr int kMaxIter = 64;
  constexpr Scalar kEps = 1e-12;

  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Scalar dist = closest.norm();
    if (dist < kEps) return 0.0;

    // New candidate along -closest.
    const Vec2 w = support(-closest);
    // Lower bound on the distance from the supporting hyperplane at w; stop
    // when it matches the incumbent.
    const Scalar improvement = dist - closest.dot(w) / dist;
    if (improvement <= 1e-12 * std::max(1.0, dist)) return dist;

    simplex[n++] = w;

    if (n == 2) {
      closest = segment_closest_to_origin(simplex[0], simplex[1]);
    } else {
      // Keep the segment whose closest point is nearest the origin.
      const Vec2 c01 = segment_closest_to_origin(simplex[0], simplex[1]);
      const Vec2 c02 = segment_closest_to_origin(simplex[0], simplex[2]);
      const Vec2 c12 = segment_closest_to_origin(simplex[1], simplex[2]);
      // Origin inside the triangle => overlap.
      const Vec2 a = simplex[0], b = simplex[1], c = simplex[2];
      const Scalar d1 = cross2(b - a, -a);
      const Scalar d2 = cross2(c - b, -b);
      const Scalar d3 = cross2(a - c, -c);
      const bool has_neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
      const bool has_pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
      if (!(has_neg && has_pos)) return 0.0;

      const Scalar n01 = c01.squaredNorm(), n02 = c02.squaredNorm(),
                   n12 = c12.squaredNorm();
      if (n12 <= n01 && n12 <= n02) {
        simplex[0] = simplex[1];
        simplex[1] = simplex[2];
        closest = c12;
      } else if (n02 <= n01) {
        simplex[1] = simplex[2];
        closest = c02;
      } else {
        closest = c01;
      }
      n = 2;
    }
  }
  return closest.norm();
}

/// Signed distance from a world point to a placed shape (negative inside).
inline Scalar point_shape_distance(const Vec2& p, const ConvexShape& s,
                                   const Pose2& pose) {
  if (s.is_circle()) {
    return (p - pose.translation()).norm() - s.radius();
  }
  const Vec2 local = pose.inverse().apply(p);
  const auto& verts = s.vertices();
  const auto n = verts.size();
  bool inside = true;
  Scalar boundary = std::numeric_limits<Scalar>::max();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = verts[i];
    const Vec2& b = verts[(i + 1) % n];
    if (cross2(b - a, local - a) < 0.0) inside = false;
    boundary = std::min(boundary, point_segment_distance(local, a, b));
  }
  return inside ? -boundary : boundary;
}

/// Exact penetration depth of two overlapping world-frame convex polygons.
/// The minimum translation vector of a convex polygon pair points along a
/// face normal of one of them, so the depth is the smallest *directed* push
/// (amax - bmin or bmax - amin) over all face-normal axes.  Returns a
/// negative value when the polygons overlap, otherwise a positive sentinel.
inline Scalar polygon_overlap_signed(const std::vector<Vec2>& pa,
                                     const std::vector<Vec2>& pb) {
  Scalar depth = std::numeric_limits<Scalar>::max();
  const auto test_axes = [&](const std::vector<Vec2>& poly) -> bool {
    const auto n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 e = poly[(i + 1) % n] - poly[i];
      Vec2 axis(-e.y(), e.x());
      const Scalar len = axis.norm();
      if (len < 1e-300) continue;
      axis /= len;
      Scalar amin = std::numeric_limits<Scalar>::max(), amax = -amin;
      for (const Vec2& v : pa) {
        const Scalar d = axis.dot(v);
        amin = std::min(amin, d);
        amax = std::max(amax, d);
      }
      Scalar bmin = std::numeric_limits<Scalar>::max(), bmax = -bmin;
      for (const Vec2& v : pb) {
        const Scalar d = axis.dot(v);
        bmin = std::min(bmin, d);
        bmax = std::max(bmax, d);
      }
      const Scalar push = std::min(amax - bmin, bmax - amin);
      if (push < 0.0) return false;  // separating axis found
      depth = std::min(depth, push);
    }
    return true;
  };
  if (!test_axes(pa) || !test_axes(pb)) return 1.0;  // disjoint sentinel
  return -depth;
}

}  // namespace detail

/// Signed distance between two placed convex shapes: positive separation,
/// negative penetration depth, 0 exactly at touch.
inline Scalar signed_distance(const ConvexShape& a, const Pose2& pa,
                              const ConvexShape& b, const Pose2& pb) {
  // Circle-circle: closed form.
  if (a.is_circle() && b.is_circle()) {
    return (pa.translation() - pb.translation()).norm() - a.radius() - b.radius();
  }
  // Circle-polygon: point-polygon distance minus the radius (holds for
  // separation and penetration alike).
  if (a.is_circle() != b.is_circle()) {
    const ConvexShape& circ = a.is_circle() ? a : b;
    const Pose2& circ_pose = a.is_circle() ? pa : pb;
    const ConvexShape& poly = a.is_circle() ? b : a;
    const Pose2& poly_pose = a.is_circle() ? pb : pa;
    return detail::point_shape_distance(circ_pose.translation(), poly, poly_pose) -
           circ.radius();
  }
  // Polygon-polygon.
  const std::vector<Vec2> wa = detail::world_vertices(a, pa);
  const std::vector<Vec2> wb = detail::world_vertices(b, pb);
  const Scalar overlap = detail::polygon_overlap_signed(wa, wb);
  if (overlap <= 0.0) return overlap;  // overlapping: exact penetration depth
  // Disjoint: support-function GJK on the Minkowski difference.
  const auto diff_support = [&](const Vec2& dir) -> Vec2 {
    // support_{A-B}(d) = support_A(d) - support_B(-d), all in world frame.
    const Vec2 da = Pose2(0, 0, -pa.theta).rotate(dir);
    const Vec2 db = Pose2(0, 0, -pb.theta).rotate(-dir);
    return pa.apply(a.support(da)) - pb.apply(b.support(db));
  };
  return detail::gjk_distance(diff_support);
}

/// Signed distance from a world point to a placed shape (negative inside).
inline Scalar point_signed_distance(const Vec2& p, const ConvexShape& s,
                                    const Pose2& pose) {
  return detail::point_shape_distance(p, s, pose);
}

}  // namespace akplan
