// SPDX-License-Identifier: Apache-2.0
//
// Independent trajectory verification.  This walks a trajectory and
// recomputes every constraint family directly from the problem definition —
// deliberately not sharing the solver's residual assembly — so solver claims
// can be cross-checked by tests and benchmarks.
#pragma once

#include <algorithm>
#include <map>
#include <string>

#include "akplan/geometry/distance.hpp"
#include "akplan/trajopt/problem.hpp"
#include "akplan/trajopt/trajectory.hpp"

namespace akplan {

/// Constraint-family identifiers used in reports.
namespace family {
inline constexpr const char* kGoal = "goal";
inline constexpr const char* kChain = "chain";
inline constexpr const char* kLimits = "limits";
inline constexpr const char* kVelocity = "velocity";
inline constexpr const char* kAcceleration = "acceleration";
inline constexpr const char* kCollisionObstacle = "collision_obstacle";
inline constexpr const char* kCollisionSelf = "collision_self";
}  // namespace family

struct TrajectoryCheck {
  /// Worst excess over the family's tolerance; <= 0 means satisfied.
  std::map<std::string, Scalar> violation;
  Scalar objective{0.0};

  [[nodiscard]] Scalar max_violation() const {
    Scalar worst = 0.0;
    for (const auto& [name, v] : violation) worst = std::max(worst, v);
    return worst;
  }

  [[nodiscard]] bool feasible(Scalar slack = 1e-6) const {
    return max_violation() <= slack;
  }

  /// Family with the largest violation, or empty when feasible.
  [[nodiscard]] std::string dominant_family(Scalar slack = 1e-6) const {
    std::string worst_name;
    Scalar worst = slack;
    for (const auto& [name, v] : violation) {
      if (v > worst) {
        worst = v;
        worst_name = name;
      }
    }
    return worst_name;
  }
};

inline TrajectoryCheck check_trajectory(const OptProblem& problem,
                                        const Trajectory& traj) {
  require(traj.cols() == problem.dofs(), ErrorKind::kDimension,
          "trajectory dof mismatch");
  require(traj.rows() >= 2, ErrorKind::kDimension, "trajectory too short");
  const TrajoptParams& prm = problem.params;
  const Akr& akr = problem.akr;
  const Eigen::Index T = traj.rows();

  TrajectoryCheck out;
  out.objective = trajectory_objective(traj, prm.w_v, prm.w_a);

  // Goal: squared distance in goal space at the terminal step.
  const Vec gr = goal_residual(akr, problem.goal, traj.row(T - 1).transpose());
  out.violation[family::kGoal] = gr.squaredNorm() - prm.xi_goal;

  // Chain closure at every step (norm against its tolerance).
  Scalar chain = -prm.xi_chain;
  // Limits, velocity, acceleration: elementwise excesses.
  Scalar limits = -1.0;
  Scalar vel = -1.0;
  Scalar acc = -1.0;
  Scalar col_obs = -prm.xi_dist;
  Scalar col_self = -prm.xi_dist;
  const Vec& lo = akr.lower_limits();
  const Vec& hi = akr.upper_limits();

  for (Eigen::Index t = 0; t < T; ++t) {
    const Vec q = traj.row(t).transpose();
    const FkResult fk = akr.fk(q);
    chain = std::max(chain,
                     akr.chain_residual_from_fk(fk).norm() - prm.xi_chain);

    for (Eigen::Index i = 0; i < q.size(); ++i) {
      limits = std::max({limits, q[i] - hi[i], lo[i] - q[i]});
    }
    if (t + 1 < T) {
      const Vec d = (traj.row(t + 1) - traj.row(t)).transpose();
      vel = std::max(vel, d.cwiseAbs().maxCoeff() - prm.dq_max);
    }
    if (t >= 1 && t + 1 < T) {
      const Vec a =
          (traj.row(t + 1) - 2.0 * traj.row(t) + traj.row(t - 1)).transpose();
      acc = std::max(acc, a.cwiseAbs().maxCoeff() - prm.ddq_max);
    }

    // Collision sums, recomputed here without the shared helper.
    const auto bodies = akr.bodies_from_fk(fk);
    Scalar obs_sum = 0.0;
    for (const AkrBody& b : bodies) {
      for (const PlacedShape& o : problem.obstacles) {
        const Scalar sd =
            signed_distance(akr.link_shape(b.link), b.pose, o.shape, o.pose);
        obs_sum += std::max(0.0, prm.dist_safe - sd);
      }
    }
    Scalar self_sum = 0.0;
    for (const auto& [la, lb] : akr.self_pairs()) {
      const Scalar sd = signed_distance(akr.link_shape(la), fk.link_pose[la],
                                        akr.link_shape(lb), fk.link_pose[lb]);
      self_sum += std::max(0.0, prm.dist_safe - sd);
    }
    col_obs = std::max(col_obs, obs_sum - prm.xi_dist);
    col_self = std::max(col_self, self_sum - prm.xi_dist);
  }

  out.violation[family::kChain] = chain;
  out.violation[family::kLimits] = limits;
  out.violation[family::kVelocity] = vel;
  out.violation[family::kAcceleration] = acc;
  out.violation[family::kCollisionObstacle] = col_obs;
  out.violation[family::kCollisionSelf] = col_self;
  return out;
}

}  // namespace akplan
