// SPDX-License-Identifier: Apache-2.0
//
// Trajectory seeds.  Three strategies: hold the start configuration, linearly
// interpolate start to goal, or route the base through a grid A* path on the
// inflated obstacle map and interpolate the remaining joints.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "akplan/geometry/astar.hpp"
#include "akplan/geometry/occupancy_grid.hpp"
#include "akplan/geometry/pose2.hpp"
#include "akplan/trajopt/problem.hpp"
#include "akplan/trajopt/trajectory.hpp"

namespace akplan {

/// Grid parameters for the A* seed: cell size and the obstacle inflation
/// radius the base footprint is shrunk to a point against.
struct AstarSeedParams {
  Scalar resolution{0.05};
  /// Negative means "use the base footprint's bounding radius".
  Scalar inflation{-1.0};
  /// Extra free margin added around obstacles and endpoints when sizing the
  /// grid.
  Scalar border{0.5};
};

namespace detail {

/// Dofs whose limit range spans a full turn interpolate along the shortest
/// angular arc (possibly exiting (-pi, pi], never the limits); bounded
/// revolute joints move linearly like any other dof.
inline Vec interpolation_delta(const OptProblem& problem, const Vec& from,
                               const Vec& to) {
  Vec delta = to - from;
  const Vec& lo = problem.akr.lower_limits();
  const Vec& hi = problem.akr.upper_limits();
  const auto& tree = problem.akr.tree();
  const auto& names = problem.akr.dof_names();
  for (int i = 0; i < delta.size(); ++i) {
    const Joint& j = tree.joints()[tree.joint_index(names[static_cast<std::size_t>(i)])];
    if (j.type != JointType::kRevolute) continue;
    if (hi[i] - lo[i] < 2.0 * kPi) continue;
    const Scalar wrapped = angle_diff(to[i], from[i]);
    if (from[i] + wrapped >= lo[i] && from[i] + wrapped <= hi[i]) {
      delta[i] = wrapped;
    }
  }
  return delta;
}

/// Conservative free-space test for a straight segment: samples at quarter
/// resolution, checking each visited cell and — on diagonal cell hops — the
/// two corner-adjacent cells as well.
inline bool segment_free(const OccupancyGrid& grid, const Vec2& a,
                         const Vec2& b) {
  const Scalar len = (b - a).norm();
  const int steps =
      std::max(1, static_cast<int>(std::ceil(len / (0.25 * grid.resolution()))));
  GridCell prev = grid.cell_of(a);
  if (grid.occupied(prev)) return false;
  for (int i = 1; i <= steps; ++i) {
    const Vec2 p = a + (b - a) * (static_cast<Scalar>(i) / steps);
    const GridCell c = grid.cell_of(p);
    if (grid.occupied(c)) return false;
    if (c.x != prev.x && c.y != prev.y &&
        (grid.occupied({c.x, prev.y}) || grid.occupied({prev.x, c.y}))) {
      return false;
    }
    prev = c;
  }
  return true;
}

/// Greedy string-pulling: drop intermediate polyline points whenever the
/// direct segment stays in free cells.  A path across an empty grid collapses
/// to its two endpoints.
inline std::vector<Vec2> shortcut_polyline(const OccupancyGrid& grid,
                                           const std::vector<Vec2>& pts) {
  if (pts.size() <= 2) return pts;
  std::vector<Vec2> out{pts.front()};
  std::size_t i = 0;
  while (i + 1 < pts.size()) {
    std::size_t next = i + 1;
    for (std::size_t j = pts.size() - 1; j > i + 1; --j) {
      if (segment_free(grid, pts[i], pts[j])) {
        next = j;
        break;
      }
    }
    out.push_back(pts[next]);
    i = next;
  }
  return out;
}

}  // namespace detail

/// T copies of the start configuration.
inline Trajectory initialize_stationary(const OptProblem& problem) {
  Trajectory traj(problem.params.waypoints, problem.dofs());
  for (Eigen::Index t = 0; t < traj.rows(); ++t) {
    traj.row(t) = problem.start.transpose();
  }
  return traj;
}

/// Linear interpolation from start to goal (shortest-arc for free-spinning
/// angular dofs).
inline Trajectory initialize_interpolated(const OptProblem& problem,
                                          const Vec& goal_cfg) {
  const int T = problem.params.waypoints;
  const Vec delta = detail::interpolation_delta(problem, problem.start, goal_cfg);
  Trajectory traj(T, problem.dofs());
  for (int t = 0; t < T; ++t) {
    const Scalar s = T == 1 ? 0.0 : static_cast<Scalar>(t) / (T - 1);
    traj.row(t) = (problem.start + s * delta).transpose();
  }
  return traj;
}

/// Base path via grid A* on the inflated obstacle map, resampled to T
/// arc-length-uniform waypoints; all other dofs interpolated as in
/// initialize_interpolated.  Returns nothing when no base path exists (either
/// endpoint cell occupied, or the grid search fails); callers typically fall
/// back to initialize_interpolated.
inline std::optional<Trajectory> initialize_astar(
    const OptProblem& problem, const Vec& goal_cfg,
    const AstarSeedParams& seed_params = {}) {
  const int T = problem.params.waypoints;
  Scalar inflation = seed_params.inflation;
  if (inflation < 0.0) {
    inflation = problem.akr
                    .link_shape(problem.akr.tree().link_index(
                        problem.akr.base_link()))
                    .bounding_radius();
  }

  const Vec2 s(problem.start[0], problem.start[1]);
  const Vec2 g(goal_cfg[0], goal_cfg[1]);
  Bounds bounds{std::min(s.x(), g.x()), std::min(s.y(), g.y()),
                std::max(s.x(), g.x()), std::max(s.y(), g.y())};
  for (const PlacedShape& o : problem.obstacles) {
    const Scalar r = o.shape.bounding_radius();
    bounds.x_min = std::min(bounds.x_min, o.pose.x - r);
    bounds.y_min = std::min(bounds.y_min, o.pose.y - r);
    bounds.x_max = std::max(bounds.x_max, o.pose.x + r);
    bounds.y_max = std::max(bounds.y_max, o.pose.y + r);
  }
  const Scalar pad = inflation + seed_params.border;
  bounds.x_min -= pad;
  bounds.y_min -= pad;
  bounds.x_max += pad;
  bounds.y_max += pad;

  const OccupancyGrid grid = rasterize(problem.obstacles, bounds,
                                       seed_params.resolution, inflation);
  const auto path = astar(grid, grid.cell_of(s), grid.cell_of(g));
  if (!path) return std::nullopt;

  // Polyline through cell centers, with exact endpoints, straightened by
  // string-pulling inside free space.
  std::vector<Vec2> pts;
  pts.push_back(s);
  for (const GridCell& c : path->cells) pts.push_back(grid.cell_center(c));
  pts.push_back(g);
  pts = detail::shortcut_polyline(grid, pts);

  std::vector<Scalar> cum{0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    cum.push_back(cum.back() + (pts[i] - pts[i - 1]).norm());
  }
  const Scalar total = cum.back();

  Trajectory traj = initialize_interpolated(problem, goal_cfg);
  for (int t = 0; t < T; ++t) {
    const Scalar target = total * (T == 1 ? 0.0 : static_cast<Scalar>(t) / (T - 1));
    // Locate the segment containing this arc length.
    std::size_t k = 1;
    while (k + 1 < cum.size() && cum[k] < target) ++k;
    const Scalar seg = cum[k] - cum[k - 1];
    const Scalar u = seg <= 1e-12 ? 0.0 : (target - cum[k - 1]) / seg;
    const Vec2 p = pts[k - 1] + u * (pts[k] - pts[k - 1]);
    traj(t, 0) = p.x();
    traj(t, 1) = p.y();
  }
  return traj;
}

}  // namespace akplan
