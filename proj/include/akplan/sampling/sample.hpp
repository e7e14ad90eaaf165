// SPDX-License-Identifier: Apache-2.0
//
// Goal-configuration sampling.  Draws uniform random in-limit seeds, pulls
// each onto the constraint manifold with damped-least-squares descent on the
// stacked closure + goal residual, and keeps the solutions that satisfy the
// closure tolerance, the goal tolerance, the joint limits, and — checked
// last because it is the most expensive test — collision clearance.

#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>

#include "akplan/common.hpp"
#include "akplan/kinematics/akr.hpp"
#include "akplan/trajopt/problem.hpp"

namespace akplan {

// A batch of configurations sampled for one articulated-robot model.  The
// pointer is non-owning: the robot must outlive the set.
struct ConfigSet {
  std::vector<Vec> configs;
  const Akr* akr{nullptr};
};

struct SampleParams {
  int n_c{100};        // requested number of configurations
  int max_tries{1000}; // random restarts before giving up

  // Acceptance tolerances.  Closure and goal bounds apply to the squared
  // residual norm; collision uses the same hinge sums as the trajectory
  // checker so accepted goals remain feasible terminal states.
  Scalar xi_chain{1e-3};
  Scalar xi_goal{1e-4};
  Scalar dist_safe{0.05};
  Scalar xi_dist{1e-3};

  // Damped-least-squares descent.
  Scalar dls_damping{1e-3};
  int dls_iterations{200};
  Scalar dls_residual_change{1e-10};

  // Two accepted configurations closer than this in max-norm are duplicates.
  Scalar duplicate_eps{1e-6};
};

namespace detail {

// Damped-least-squares descent on the stacked residual [closure; goal].
// Iterates are clamped to the joint limits; descent stops when the residual
// norm settles or the iteration budget runs out.
inline Vec dls_ik(const Akr& akr, const GoalSpec& goal, Vec q,
                  const SampleParams& params) {
  const Vec lo = akr.lower_limits();
  const Vec hi = akr.upper_limits();
  const int n = akr.dof_count();
  const int nc = akr.chain_dim();
  const int ng = goal.dim();

  q = q.cwiseMax(lo).cwiseMin(hi);
  Scalar prev_norm = -1.0;
  for (int it = 0; it < params.dls_iterations; ++it) {
    Vec r(nc + ng);
    if (nc > 0) r.head(nc) = akr.chain_residual(q);
    r.tail(ng) = goal_residual(akr, goal, q);

    const Scalar norm = r.norm();
    if (prev_norm >= 0.0 &&
        std::abs(prev_norm - norm) < params.dls_residual_change) {
      break;
    }
    prev_norm = norm;

    Mat jac(nc + ng, n);
    if (nc > 0) jac.topRows(nc) = akr.chain_jacobian(q);
    jac.bottomRows(ng) = goal_jacobian(akr, goal, q);

    Mat normal = jac.transpose() * jac;
    normal.diagonal().array() += params.dls_damping;
    q += normal.ldlt().solve(-(jac.transpose() * r));
    q = q.cwiseMax(lo).cwiseMin(hi);
  }
  return q;
}

}  // namespace detail

// Samples up to params.n_c configurations that close the attachment chain,
// satisfy a per-restart goal map, respect joint limits, and are
// collision-clear.  `next_goal(rng)` is invoked once per restart so that
// region-style tasks can draw a fresh target from the goal region each time;
// fixed-goal tasks return the same spec on every call.  Restarts draw
// uniformly from the joint limits; the result is assembled in restart order,
// so a fixed Rng seed reproduces the set exactly.  Zero acceptances is not an
// error: the returned set is simply empty.
template <class GoalFn>
inline ConfigSet sample_valid_configurations_each(
    const Akr& akr, GoalFn&& next_goal,
    const std::vector<PlacedShape>& obstacles, const SampleParams& params,
    Rng& rng) {
  require(params.n_c >= 1, ErrorKind::kConfig,
          "sample_valid_configurations: n_c must be positive");
  require(params.max_tries >= 1, ErrorKind::kConfig,
          "sample_valid_configurations: max_tries must be positive");

  const Vec lo = akr.lower_limits();
  const Vec hi = akr.upper_limits();
  const int n = akr.dof_count();

  ConfigSet out;
  out.akr = &akr;
  for (int tries = 0;
       tries < params.max_tries &&
       static_cast<int>(out.configs.size()) < params.n_c;
       ++tries) {
    const GoalSpec goal = next_goal(rng);
    require(goal.dim() > 0, ErrorKind::kConfig,
            "sample_valid_configurations: goal with empty dimension");
    Vec q(n);
    for (int i = 0; i < n; ++i) q[i] = rng.uniform(lo[i], hi[i]);
    q = detail::dls_ik(akr, goal, q, params);

    if (akr.chain_residual(q).squaredNorm() > params.xi_chain) continue;
    if (goal_residual(akr, goal, q).squaredNorm() > params.xi_goal) continue;
    if (((q - hi).maxCoeff() > 0.0) || ((lo - q).maxCoeff() > 0.0)) continue;

    bool duplicate = false;
    for (const Vec& m : out.configs) {
      if ((q - m).lpNorm<Eigen::Infinity>() < params.duplicate_eps) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;

    // Collision clearance last: it dominates the per-candidate cost.
    const auto [obstacle_sum, self_sum] =
        collision_sums(akr, obstacles, q, params.dist_safe);
    if (obstacle_sum > params.xi_dist || self_sum > params.xi_dist) continue;

    out.configs.push_back(std::move(q));
  }
  return out;
}

// Fixed-goal entry point: every restart pursues the same goal map.
inline ConfigSet sample_valid_configurations(
    const Akr& akr, const GoalSpec& goal,
    const std::vector<PlacedShape>& obstacles, const SampleParams& params,
    Rng& rng) {
  return sample_valid_configurations_each(
      akr, [&goal](Rng&) -> const GoalSpec& { return goal; }, obstacles,
      params, rng);
}

}  // namespace akplan
