// SPDX-License-Identifier: Apache-2.0
//
// 8-connected A* over an occupancy grid.
//
// Axial moves cost 1, diagonal moves sqrt(2) (grid units); the octile
// heuristic keeps the search admissible, so returned paths are optimal.
// Diagonal steps are disallowed when both adjacent axial cells are blocked
// (no corner cutting).  Expansion order is fully deterministic.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "akplan/common.hpp"
#include "akplan/geometry/occupancy_grid.hpp"

namespace akplan {

struct GridPath {
  std::vector<GridCell> cells;  // start .. goal inclusive
  Scalar cost{0};               // in grid units (multiply by resolution for meters)
};

namespace detail {

inline Scalar octile(const GridCell& a, const GridCell& b) {
  const Scalar dx = std::abs(a.x - b.x);
  const Scalar dy = std::abs(a.y - b.y);
  return std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy);
}

}  // namespace detail

/// Shortest 8-connected path between two cells, or nullopt when none exists
/// (including an occupied or out-of-bounds start/goal).
inline std::optional<GridPath> astar(const OccupancyGrid& grid,
                                     const GridCell& start, const GridCell& goal) {
  if (grid.occupied(start) || grid.occupied(goal)) return std::nullopt;
  if (start == goal) return GridPath{{start}, 0.0};

  const int w = grid.width();
  const std::size_t n = static_cast<std::size_t>(w) * grid.height();
  constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> g(n, kInf);
  std::vector<std::int32_t> parent(n, -1);

  struct Entry {
    Scalar f;
    Scalar g;
    std::int32_t id;
  };
  // Lowest f first; ties broken on higher g (goal-ward), then lower cell id,
  // for run-to-run determinism.
  const auto worse = [](const Entry& a, const Entry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.id > b.id;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);

  const auto id_of = [&](const GridCell& c) {
    return static_cast<std::int32_t>(grid.index(c));
  };
  const auto cell_of = [&](std::int32_t id) {
    return GridCell{static_cast<int>(id % w), static_cast<int>(id / w)};
  };

  const std::int32_t start_id = id_of(start);
  g[start_id] = 0.0;
  open.push({detail::octile(start, goal), 0.0, start_id});

  static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  const Scalar kDiag = std::sqrt(2.0);

  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    if (e.g > g[e.id]) continue;  // stale
    const GridCell c = cell_of(e.id);
    if (c == goal) {
      GridPath path;
      path.cost = g[e.id];
      for (std::int32_t it = e.id; it != -1; it = parent[it]) {
        path.cells.push_back(cell_of(it));
      }
      std::reverse(path.cells.begin(), path.cells.end());
      return path;
    }
    for (int k = 0; k < 8; ++k) {
      const GridCell nb{c.x + kDx[k], c.y + kDy[k]};
      if (grid.occupied(nb)) continue;
      const bool diagonal = k >= 4;
      if (diagonal) {
        // Forbid squeezing between two blocked axial neighbors.
        if (grid.occupied({c.x + kDx[k], c.y}) || grid.occupied({c.x, c.y + kDy[k]})) {
          continue;
        }
      }
      const Scalar step = diagonal ? kDiag : 1.0;
      const Scalar ng = e.g + step;
      const std::int32_t nid = id_of(nb);
      if (ng < g[nid]) {
        g[nid] = ng;
        parent[nid] = e.id;
        open.push({ng + detail::octile(nb, goal), ng, nid});
      }
    }
  }
  return std::nullopt;
}

}  // namespace akplan
