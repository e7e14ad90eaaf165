// SPDX-License-Identifier: Apache-2.0
//
// Geometry module tests.  Reference values come from independent oracles
// implemented here: exact feature-enumeration distance, dense-direction
// penetration depth, separating-axis intersection, point-containment
// rasterization, and a heuristic-free Dijkstra.
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "akplan/common.hpp"
#include "akplan/geometry/astar.hpp"
#include "akplan/geometry/distance.hpp"
#include "akplan/geometry/occupancy_grid.hpp"
#include "akplan/geometry/pose2.hpp"
#include "akplan/geometry/shapes.hpp"

namespace akplan {
namespace {

// ---------------------------------------------------------------------------
// Oracles (kept independent of the library's distance/search internals).
// ---------------------------------------------------------------------------

double oracle_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

std::vector<Vec2> oracle_world_vertices(const ConvexShape& s, const Pose2& pose) {
  std::vector<Vec2> out;
  for (const Vec2& v : s.vertices()) {
    const double c = std::cos(pose.theta), sn = std::sin(pose.theta);
    out.push_back(
        {c * v.x() - sn * v.y() + pose.x, sn * v.x() + c * v.y() + pose.y});
  }
  return out;
}

bool oracle_point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    const Vec2 e = b - a, d = p - a;
    if (e.x() * d.y() - e.y() * d.x() < 0.0) return false;
  }
  return true;
}

// Exact separation distance between disjoint convex shapes via feature
// enumeration (vertex-segment pairs for polygons, closed forms for circles).
double oracle_separation(const ConvexShape& a, const Pose2& pa,
                         const ConvexShape& b, const Pose2& pb) {
  if (a.is_circle() && b.is_circle()) {
    return (pa.translation() - pb.translation()).norm() - a.radius() - b.radius();
  }
  if (a.is_circle() || b.is_circle()) {
    const ConvexShape& circ = a.is_circle() ? a : b;
    const Pose2& pc = a.is_circle() ? pa : pb;
    const ConvexShape& poly = a.is_circle() ? b : a;
    const Pose2& pp = a.is_circle() ? pb : pa;
    const auto verts = oracle_world_vertices(poly, pp);
    double best = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < verts.size(); ++i) {
      best = std::min(best, oracle_point_segment(pc.translation(), verts[i],
                                                 verts[(i + 1) % verts.size()]));
    }
    return best - circ.radius();
  }
  const auto va = oracle_world_vertices(a, pa);
  const auto vb = oracle_world_vertices(b, pb);
  double best = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < va.size(); ++i) {
    for (std::size_t j = 0; j < vb.size(); ++j) {
      best = std::min(best, oracle_point_segment(va[i], vb[j],
                                                 vb[(j + 1) % vb.size()]));
      best = std::min(best, oracle_point_segment(vb[j], va[i],
                                                 va[(i + 1) % va.size()]));
    }
  }
  return best;
}

double oracle_support(const ConvexShape& s, const Pose2& pose, const Vec2& dir) {
  if (s.is_circle()) return pose.translation().dot(dir) + s.radius();
  double best = -std::numeric_limits<double>::max();
  for (const Vec2& v : oracle_world_vertices(s, pose)) {
    best = std::max(best, v.dot(dir));
  }
  return best;
}

// Penetration depth of overlapping convex shapes: minimum over unit
// directions d of h_A(d) + h_B(-d).  A dense sweep locates the basin and a
// ternary search refines the minimizer.
double oracle_penetration(const ConvexShape& a, const Pose2& pa,
                          const ConvexShape& b, const Pose2& pb,
                          int samples = 4096) {
  const auto f = [&](double t) {
    const Vec2 d(std::cos(t), std::sin(t));
    return oracle_support(a, pa, d) + oracle_support(b, pb, -d);
  };
  double best_t = 0.0, best = std::numeric_limits<double>::max();
  for (int k = 0; k < samples; ++k) {
    const double t = 2.0 * kPi * k / samples;
    const double v = f(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  double lo = best_t - 2.0 * kPi / samples, hi = best_t + 2.0 * kPi / samples;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (f(m1) <= f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::min(best, f((lo + hi) / 2.0));
}

// Exact intersection predicate: separating-axis test for polygons, closed
// forms when circles are involved.
bool oracle_intersects(const ConvexShape& a, const Pose2& pa,
                       const ConvexShape& b, const Pose2& pb) {
  if (a.is_circle() && b.is_circle()) {
    return (pa.translation() - pb.translation()).norm() <= a.radius() + b.radius();
  }
  if (a.is_circle() || b.is_circle()) {
    const ConvexShape& circ = a.is_circle() ? a : b;
    const Pose2& pc = a.is_circle() ? pa : pb;
    const ConvexShape& poly = a.is_circle() ? b : a;
    const Pose2& pp = a.is_circle() ? pb : pa;
    const auto verts = oracle_world_vertices(poly, pp);
    if (oracle_point_in_polygon(pc.translation(), verts)) return true;
    double d = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < verts.size(); ++i) {
      d = std::min(d, oracle_point_segment(pc.translation(), verts[i],
                                           verts[(i + 1) % verts.size()]));
    }
    return d <= circ.radius();
  }
  const auto va = oracle_world_vertices(a, pa);
  const auto vb = oracle_world_vertices(b, pb);
  const auto separated_on_axes = [&](const std::vector<Vec2>& poly) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 e = poly[(i + 1) % poly.size()] - poly[i];
      const Vec2 axis(-e.y(), e.x());
      double amin = std::numeric_limits<double>::max(), amax = -amin;
      for (const Vec2& v : va) {
        amin = std::min(amin, axis.dot(v));
        amax = std::max(amax, axis.dot(v));
      }
      double bmin = std::numeric_limits<double>::max(), bmax = -bmin;
      for (const Vec2& v : vb) {
        bmin = std::min(bmin, axis.dot(v));
        bmax = std::max(bmax, axis.dot(v));
      }
      if (amax < bmin || bmax < amin) return true;
    }
    return false;
  };
  return !separated_on_axes(va) && !separated_on_axes(vb);
}

// Heuristic-free Dijkstra with the same motion model as the library's A*.
std::optional<double> oracle_dijkstra(const OccupancyGrid& grid,
                                      const GridCell& start, const GridCell& goal) {
  if (grid.occupied(start) || grid.occupied(goal)) return std::nullopt;
  const int w = grid.width(), h = grid.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<char> done(n, 0);
  const auto id = [&](const GridCell& c) {
    return static_cast<std::size_t>(c.y) * w + c.x;
  };
  dist[id(start)] = 0.0;
  static constexpr int dx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int dy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  for (;;) {
    std::size_t best = n;
    double bd = inf;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && dist[i] < bd) {
        bd = dist[i];
        best = i;
      }
    }
    if (best == n) break;
    done[best] = 1;
    const GridCell c{static_cast<int>(best % w), static_cast<int>(best / w)};
    for (int k = 0; k < 8; ++k) {
      const GridCell nb{c.x + dx[k], c.y + dy[k]};
      if (grid.occupied(nb)) continue;
      if (k >= 4 && (grid.occupied({c.x + dx[k], c.y}) ||
                     grid.occupied({c.x, c.y + dy[k]}))) {
        continue;
      }
      const double step = k >= 4 ? std::sqrt(2.0) : 1.0;
      dist[id(nb)] = std::min(dist[id(nb)], dist[best] + step);
    }
  }
  const double d = dist[id(goal)];
  if (d == inf) return std::nullopt;
  return d;
}

ConvexShape random_shape(Rng& rng) {
  if (rng.uniform() < 0.4) {
    return ConvexShape::circle(rng.uniform(0.1, 1.2));
  }
  // Random strictly convex polygon: sorted angles on a radius-perturbed disc.
  const int n = rng.uniform_int(3, 7);
  std::vector<double> angles;
  for (int i = 0; i < n; ++i) angles.push_back(rng.uniform(0.0, 2.0 * kPi));
  std::sort(angles.begin(), angles.end());
  // Reject near-duplicate angles to keep the hull strictly convex.
  for (int i = 1; i < n; ++i) {
    if (angles[i] - angles[i - 1] < 0.15) return random_shape(rng);
  }
  if (2.0 * kPi - (angles.back() - angles.front()) < 0.15) return random_shape(rng);
  const double r = rng.uniform(0.3, 1.2);
  std::vector<Vec2> verts;
  for (double a : angles) verts.push_back({r * std::cos(a), r * std::sin(a)});
  return ConvexShape::polygon(verts);
}

Pose2 random_pose(Rng& rng, double span) {
  return {rng.uniform(-span, span), rng.uniform(-span, span),
          rng.uniform(-kPi, kPi)};
}

// ---------------------------------------------------------------------------
// Pose2
// ---------------------------------------------------------------------------

TEST(Pose2Test, ComposeWithInverseIsIdentity) {
  Rng rng(7001);
  for (int i = 0; i < 200; ++i) {
    const Pose2 p = random_pose(rng, 10.0);
    const Pose2 q = random_pose(rng, 10.0);
    const Pose2 id1 = p * p.inverse();
    EXPECT_NEAR(id1.x, 0.0, 1e-12);
    EXPECT_NEAR(id1.y, 0.0, 1e-12);
    EXPECT_NEAR(wrap_angle(id1.theta), 0.0, 1e-12);
    // Associativity-compatible round trip through a second pose.
    const Pose2 r = (p * q) * q.inverse();
    EXPECT_NEAR(r.x, p.x, 1e-9);
    EXPECT_NEAR(r.y, p.y, 1e-9);
    EXPECT_NEAR(angle_diff(r.theta, p.theta), 0.0, 1e-12);
  }
}

TEST(Pose2Test, HeadingAlwaysWrapped) {
  EXPECT_NEAR(Pose2(0, 0, 3.0 * kPi).theta, kPi, 1e-12);
  EXPECT_NEAR(Pose2(0, 0, -kPi).theta, kPi, 1e-12);
  EXPECT_NEAR(Pose2(0, 0, 2.0 * kPi).theta, 0.0, 1e-12);
  Rng rng(7002);
  for (int i = 0; i < 500; ++i) {
    const Pose2 p(0, 0, rng.uniform(-50.0, 50.0));
    EXPECT_GT(p.theta, -kPi);
    EXPECT_LE(p.theta, kPi);
  }
}

TEST(Pose2Test, ApplyMatchesManualTrig) {
  const Pose2 p(1.0, 2.0, kPi / 2.0);
  const Vec2 q = p.apply({1.0, 0.0});
  EXPECT_NEAR(q.x(), 1.0, 1e-12);
  EXPECT_NEAR(q.y(), 3.0, 1e-12);
}

// ---------------------------------------------------------------------------
// Shapes
// ---------------------------------------------------------------------------

TEST(ShapeTest, RejectsInvalidInput) {
  EXPECT_THROW(ConvexShape::circle(0.0), Error);
  EXPECT_THROW(ConvexShape::circle(-1.0), Error);
  // Clockwise square.
  EXPECT_THROW(
      ConvexShape::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), Error);
  // Too few vertices.
  EXPECT_THROW(ConvexShape::polygon({{0, 0}, {1, 0}}), Error);
  // Non-convex quad.
  EXPECT_THROW(
      ConvexShape::polygon({{0, 0}, {2, 0}, {0.1, 0.1}, {0, 2}}), Error);
}

TEST(ShapeTest, SupportFunction) {
  const ConvexShape sq = ConvexShape::box(2.0, 2.0);
  const Vec2 s = sq.support({1.0, 0.5});
  EXPECT_NEAR(s.x(), 1.0, 1e-12);
  EXPECT_NEAR(s.y(), 1.0, 1e-12);
  const ConvexShape c = ConvexShape::circle(2.0);
  EXPECT_NEAR(c.support({0.0, -3.0}).y(), -2.0, 1e-12);
}

// ---------------------------------------------------------------------------
// Signed distance
// ---------------------------------------------------------------------------

TEST(SignedDistanceTest, PinnedExamples) {
  const ConvexShape c1 = ConvexShape::circle(1.0);
  // Two unit circles 3 m apart: separation 1.
  EXPECT_NEAR(signed_distance(c1, {0, 0, 0}, c1, {3, 0, 0}), 1.0, 1e-9);
  // Coincident unit circles: penetration -2.
  EXPECT_NEAR(signed_distance(c1, {0, 0, 0}, c1, {0, 0, 0}), -2.0, 1e-9);
  // Unit squares centered at (0,0) and (3,0): separation 2.
  const ConvexShape sq = ConvexShape::box(1.0, 1.0);
  EXPECT_NEAR(signed_distance(sq, {0, 0, 0}, sq, {3, 0, 0}), 2.0, 1e-9);
}

TEST(SignedDistanceTest, MatchesFeatureOracleWhenDisjoint) {
  Rng rng(7010);
  int checked = 0;
  while (checked < 400) {
    const ConvexShape a = random_shape(rng);
    const ConvexShape b = random_shape(rng);
    const Pose2 pa = random_pose(rng, 3.0);
    const Pose2 pb = random_pose(rng, 3.0);
    if (oracle_intersects(a, pa, b, pb)) continue;
    const double expected = oracle_separation(a, pa, b, pb);
    EXPECT_NEAR(signed_distance(a, pa, b, pb), expected, 1e-9);
    ++checked;
  }
}

TEST(SignedDistanceTest, MatchesPenetrationOracleWhenOverlapping) {
  Rng rng(7011);
  int checked = 0;
  while (checked < 80) {
    const ConvexShape a = random_shape(rng);
    const ConvexShape b = random_shape(rng);
    const Pose2 pa = random_pose(rng, 0.8);
    const Pose2 pb = random_pose(rng, 0.8);
    if (!oracle_intersects(a, pa, b, pb)) continue;
    const double expected = -oracle_penetration(a, pa, b, pb);
    EXPECT_NEAR(signed_distance(a, pa, b, pb), expected, 1e-9);
    ++checked;
  }
}

TEST(SignedDistanceTest, SignAgreesWithExactIntersection) {
  Rng rng(7012);
  for (int i = 0; i < 1000; ++i) {
    const ConvexShape a = random_shape(rng);
    const ConvexShape b = random_shape(rng);
    const Pose2 pa = random_pose(rng, 1.5);
    const Pose2 pb = random_pose(rng, 1.5);
    const double sd = signed_distance(a, pa, b, pb);
    if (oracle_intersects(a, pa, b, pb)) {
      EXPECT_LE(sd, 1e-9);
    } else {
      EXPECT_GE(sd, -1e-9);
    }
  }
}

TEST(SignedDistanceTest, SymmetricInArguments) {
  Rng rng(7013);
  for (int i = 0; i < 300; ++i) {
    const ConvexShape a = random_shape(rng);
    const ConvexShape b = random_shape(rng);
    const Pose2 pa = random_pose(rng, 2.0);
    const Pose2 pb = random_pose(rng, 2.0);
    EXPECT_NEAR(signed_distance(a, pa, b, pb), signed_distance(b, pb, a, pa),
                1e-9);
  }
}

TEST(SignedDistanceTest, LipschitzInTranslation) {
  Rng rng(7014);
  for (int i = 0; i < 300; ++i) {
    const ConvexShape a = random_shape(rng);
    const ConvexShape b = random_shape(rng);
    const Pose2 pa = random_pose(rng, 2.0);
    Pose2 pb = random_pose(rng, 2.0);
    const double d0 = signed_distance(a, pa, b, pb);
    const Vec2 t(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
    const Pose2 pb2(pb.x + t.x(), pb.y + t.y(), pb.theta);
    const double d1 = signed_distance(a, pa, b, pb2);
    EXPECT_LE(std::abs(d1 - d0), t.norm() + 1e-9);
  }
}

// ---------------------------------------------------------------------------
// Rasterization
// ---------------------------------------------------------------------------

TEST(RasterizeTest, CellCentersInsideObstacleAreOccupied) {
  const std::vector<PlacedShape> shapes = {
      {ConvexShape::box(2.0, 2.0), Pose2(5.0, 5.0, 0.0)}};
  const OccupancyGrid grid =
      rasterize(shapes, Bounds{0, 0, 10, 10}, 1.0, 0.0);
  EXPECT_EQ(grid.width(), 10);
  EXPECT_EQ(grid.height(), 10);
  // Centers at (4.5, 4.5), (5.5, 5.5) lie inside the box.
  EXPECT_TRUE(grid.occupied(grid.cell_of({4.5, 4.5})));
  EXPECT_TRUE(grid.occupied(grid.cell_of({5.5, 5.5})));
  EXPECT_FALSE(grid.occupied(grid.cell_of({0.5, 0.5})));
  EXPECT_FALSE(grid.occupied(grid.cell_of({9.5, 9.5})));
  // Out-of-bounds lookups read occupied.
  EXPECT_TRUE(grid.occupied({-1, 0}));
  EXPECT_TRUE(grid.occupied({0, 10}));
}

TEST(RasterizeTest, InflatedCountMatchesContainmentOracle) {
  // 1x1 square at the center, inflation 0.3, resolution 0.1 over a 4x4 world.
  const Pose2 pose(2.0, 2.0, 0.0);
  const std::vector<PlacedShape> shapes = {{ConvexShape::box(1.0, 1.0), pose}};
  const Bounds bounds{0, 0, 4, 4};
  const double res = 0.1, inflation = 0.3;
  const OccupancyGrid grid = rasterize(shapes, bounds, res, inflation);

  // Oracle: distance from a point to an axis-aligned square via closed form.
  const auto rect_distance = [&](const Vec2& p) {
    const double dx = std::max(std::abs(p.x() - pose.x) - 0.5, 0.0);
    const double dy = std::max(std::abs(p.y() - pose.y) - 0.5, 0.0);
    return std::hypot(dx, dy);
  };
  std::size_t expected = 0;
  for (int iy = 0; iy < grid.height(); ++iy) {
    for (int ix = 0; ix < grid.width(); ++ix) {
      const Vec2 c = grid.cell_center({ix, iy});
      if (rect_distance(c) <= inflation) ++expected;
    }
  }
  EXPECT_GT(expected, 0u);
  EXPECT_EQ(grid.occupied_count(), expected);
  // And cell-by-cell agreement, not just the count.
  for (int iy = 0; iy < grid.height(); ++iy) {
    for (int ix = 0; ix < grid.width(); ++ix) {
      const Vec2 c = grid.cell_center({ix, iy});
      EXPECT_EQ(grid.occupied({ix, iy}), rect_distance(c) <= inflation)
          << "cell (" << ix << ", " << iy << ")";
    }
  }
}

// ---------------------------------------------------------------------------
// A*
// ---------------------------------------------------------------------------

TEST(AStarTest, FreeGridDiagonal) {
  const OccupancyGrid grid({0, 0}, 1.0, 10, 10);
  const auto path = astar(grid, {0, 0}, {9, 9});
  ASSERT_TRUE(path.has_value());
  EXPECT_NEAR(path->cost, 9.0 * std::sqrt(2.0), 1e-9);
  EXPECT_EQ(path->cells.front(), (GridCell{0, 0}));
  EXPECT_EQ(path->cells.back(), (GridCell{9, 9}));
}

TEST(AStarTest, TrivialAndBlockedCases) {
  OccupancyGrid grid({0, 0}, 1.0, 8, 8);
  const auto trivial = astar(grid, {3, 3}, {3, 3});
  ASSERT_TRUE(trivial.has_value());
  EXPECT_EQ(trivial->cells.size(), 1u);
  EXPECT_EQ(trivial->cost, 0.0);

  // Full vertical wall: unreachable.
  for (int y = 0; y < 8; ++y) grid.set_occupied({4, y});
  EXPECT_FALSE(astar(grid, {0, 0}, {7, 0}).has_value());

  // Occupied endpoints.
  grid.set_occupied({0, 0});
  EXPECT_FALSE(astar(grid, {0, 0}, {7, 7}).has_value());
  EXPECT_FALSE(astar(grid, {1, 1}, {4, 4}).has_value());
}

TEST(AStarTest, PathStepsAreValid) {
  Rng rng(7020);
  for (int trial = 0; trial < 20; ++trial) {
    OccupancyGrid grid({0, 0}, 1.0, 25, 25);
    for (int y = 0; y < 25; ++y) {
      for (int x = 0; x < 25; ++x) {
        if (rng.uniform() < 0.25) grid.set_occupied({x, y});
      }
    }
    GridCell start{rng.uniform_int(0, 24), rng.uniform_int(0, 24)};
    GridCell goal{rng.uniform_int(0, 24), rng.uniform_int(0, 24)};
    const auto path = astar(grid, start, goal);
    if (!path) continue;
    EXPECT_EQ(path->cells.front(), start);
    EXPECT_EQ(path->cells.back(), goal);
    for (std::size_t i = 0; i + 1 < path->cells.size(); ++i) {
      const GridCell& a = path->cells[i];
      const GridCell& b = path->cells[i + 1];
      const int dx = b.x - a.x, dy = b.y - a.y;
      EXPECT_LE(std::abs(dx), 1);
      EXPECT_LE(std::abs(dy), 1);
      EXPECT_FALSE(grid.occupied(b));
      if (dx != 0 && dy != 0) {
        EXPECT_FALSE(grid.occupied({a.x + dx, a.y}));
        EXPECT_FALSE(grid.occupied({a.x, a.y + dy}));
      }
    }
  }
}

TEST(AStarTest, OptimalCostMatchesDijkstraOracle) {
  Rng rng(7021);
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    OccupancyGrid grid({0, 0}, 1.0, 30, 30);
    for (int y = 0; y < 30; ++y) {
      for (int x = 0; x < 30; ++x) {
        if (rng.uniform() < 0.3) grid.set_occupied({x, y});
      }
    }
    const GridCell start{rng.uniform_int(0, 29), rng.uniform_int(0, 29)};
    const GridCell goal{rng.uniform_int(0, 29), rng.uniform_int(0, 29)};
    const auto path = astar(grid, start, goal);
    const auto expected = oracle_dijkstra(grid, start, goal);
    ASSERT_EQ(path.has_value(), expected.has_value());
    if (path) {
      EXPECT_NEAR(path->cost, *expected, 1e-9);
      ++solved;
    }
  }
  EXPECT_GT(solved, 10);  // the comparison must actually exercise paths
}

}  // namespace
}  // namespace akplan
