// SPDX-License-Identifier: Apache-2.0
//
// Representative-subset selection for sampled configuration sets: k-means++
// seeding plus Lloyd iterations over the configurations, followed by picking
// the member nearest each cluster centroid.  Centroids themselves are never
// returned — they need not satisfy the constraints the members were verified
// against — so the output is always a subset of the input.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "akplan/common.hpp"
#include "akplan/geometry/pose2.hpp"
#include "akplan/sampling/sample.hpp"

namespace akplan {
namespace detail {

struct KmeansResult {
  std::vector<int> assignment;  // point index -> cluster index
  Mat centers;                  // k x d, row per cluster
  std::vector<Scalar> wcss;     // within-cluster sum of squares per iteration
};

// k-means++ seeding followed by at most max_iters Lloyd iterations.  Ties in
// seeding, assignment, and fallbacks all resolve to the lowest index, so a
// fixed Rng seed reproduces the clustering exactly.
inline KmeansResult kmeans_pp(const std::vector<Vec>& points, int k, Rng& rng,
                              int max_iters = 100) {
  const int n = static_cast<int>(points.size());
  require(k >= 1 && k <= n, ErrorKind::kConfig,
          "kmeans_pp: cluster count must be in [1, |points|]");
  const int d = static_cast<int>(points.front().size());

  KmeansResult result;
  result.centers = Mat(k, d);
  result.centers.row(0) = points[rng.uniform_int(0, n - 1)].transpose();
  Vec dist2 = Vec::Constant(n, std::numeric_limits<Scalar>::infinity());
  for (int j = 1; j < k; ++j) {
    Scalar total = 0.0;
    for (int i = 0; i < n; ++i) {
      const Scalar d2 =
          (points[i].transpose() - result.centers.row(j - 1)).squaredNorm();
      dist2[i] = std::min(dist2[i], d2);
      total += dist2[i];
    }
    int pick = -1;
    if (total > 0.0) {
      const Scalar target = rng.uniform() * total;
      Scalar cumulative = 0.0;
      for (int i = 0; i < n; ++i) {
        cumulative += dist2[i];
        if (cumulative >= target) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;  // guard against rounding at the far end
    } else {
      // All points coincide with chosen centers; fall back to the lowest
      // index so the seeding stays deterministic.
      pick = std::min(j, n - 1);
    }
    result.centers.row(j) = points[pick].transpose();
  }

  result.assignment.assign(n, -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      Scalar best_d =
          (points[i].transpose() - result.centers.row(0)).squaredNorm();
      for (int j = 1; j < k; ++j) {
        const Scalar d2 =
            (points[i].transpose() - result.centers.row(j)).squaredNorm();
        if (d2 < best_d) {
          best_d = d2;
          best = j;
        }
      }
      if (result.assignment[i] != best) {
        result.assignment[i] = best;
        changed = true;
      }
    }

    for (int j = 0; j < k; ++j) {
      Vec centroid = Vec::Zero(d);
      int count = 0;
      for (int i = 0; i < n; ++i) {
        if (result.assignment[i] == j) {
          centroid += points[i];
          ++count;
        }
      }
      if (count > 0) result.centers.row(j) = (centroid / count).transpose();
      // An empty cluster keeps its previous center.
    }

    Scalar wcss = 0.0;
    for (int i = 0; i < n; ++i) {
      wcss += (points[i].transpose() - result.centers.row(result.assignment[i]))
                  .squaredNorm();
    }
    result.wcss.push_back(wcss);
    if (!changed && iter > 0) break;
  }
  return result;
}

}  // namespace detail

// Reduces a configuration set to at most n_k members.  Sets that already fit
// the budget pass through unchanged.  Clustering runs in configuration
// coordinates treated as plain Euclidean, with revolute values wrapped into
// (-pi, pi] first so free-spinning headings that differ by full turns
// coincide; the seam at +-pi is a known artifact of that choice.  Each
// cluster contributes the member nearest its centroid (lowest index on
// ties), and members are returned with their original, unwrapped values.
inline ConfigSet downsample(const ConfigSet& set, int n_k, Rng& rng) {
  require(set.akr != nullptr, ErrorKind::kConfig,
          "downsample: configuration set has no robot model");
  require(n_k >= 1, ErrorKind::kConfig, "downsample: n_k must be positive");
  if (static_cast<int>(set.configs.size()) <= n_k) return set;

  const Akr& akr = *set.akr;
  const int n = static_cast<int>(set.configs.size());
  const int d = akr.dof_count();

  std::vector<bool> revolute(d, false);
  const auto& names = akr.dof_names();
  for (int i = 0; i < d; ++i) {
    const std::size_t ji =
        akr.tree().joint_index(names[static_cast<std::size_t>(i)]);
    revolute[i] = akr.tree().joints()[ji].type == JointType::kRevolute;
  }

  std::vector<Vec> wrapped(set.configs.begin(), set.configs.end());
  for (Vec& q : wrapped) {
    for (int i = 0; i < d; ++i) {
      if (revolute[i]) q[i] = wrap_angle(q[i]);
    }
  }

  const detail::KmeansResult km = detail::kmeans_pp(wrapped, n_k, rng, 100);

  ConfigSet out;
  out.akr = set.akr;
  for (int j = 0; j < n_k; ++j) {
    int best = -1;
    Scalar best_d = std::numeric_limits<Scalar>::infinity();
    for (int i = 0; i < n; ++i) {
      if (km.assignment[i] != j) continue;
      const Scalar d2 =
          (wrapped[i].transpose() - km.centers.row(j)).squaredNorm();
      if (d2 < best_d) {
        best_d = d2;
        best = i;
      }
    }
    if (best >= 0) out.configs.push_back(set.configs[best]);
  }
  return out;
}

}  // namespace akplan
