// SPDX-License-Identifier: Apache-2.0
//
// Benchmark metrics and the four-cause failure taxonomy.  Efforts are
// recomputed from stored trajectories (never accumulated incrementally) so
// results can always be audited against the persisted data.
#pragma once

#include <cmath>
#include <string>

#include "akplan/common.hpp"
#include "akplan/kinematics/akr.hpp"
#include "akplan/trajopt/check.hpp"
#include "akplan/trajopt/problem.hpp"
#include "akplan/trajopt/trajectory.hpp"

namespace akplan {

/// Failure causes, fixed to four buckets so methods stay comparable.
namespace cause {
inline constexpr const char* kCollision = "collision";
inline constexpr const char* kChain = "chain-violation";
inline constexpr const char* kNoPath = "no-path";
inline constexpr const char* kBudget = "budget";
}  // namespace cause

/// Total base travel distance in meters: sum of per-step (x, y) deltas.
inline Scalar base_effort(const Trajectory& traj) {
  Scalar total = 0.0;
  for (Eigen::Index t = 1; t < traj.rows(); ++t) {
    const Scalar dx = traj(t, 0) - traj(t - 1, 0);
    const Scalar dy = traj(t, 1) - traj(t - 1, 1);
    total += std::sqrt(dx * dx + dy * dy);
  }
  return total;
}

/// Cumulative angular displacement of the arm joints in radians: sum over
/// steps of the absolute per-joint deltas within the arm segment.
inline Scalar arm_effort(const Trajectory& traj, const DofLayout& layout) {
  Scalar total = 0.0;
  for (Eigen::Index t = 1; t < traj.rows(); ++t) {
    for (int i = layout.arm.begin; i < layout.arm.end; ++i) {
      total += std::abs(traj(t, i) - traj(t - 1, i));
    }
  }
  return total;
}

/// Map a constraint family reported by the trajectory checker onto the
/// four-cause taxonomy.  Collisions keep their own bucket; every kinematic
/// family (chain closure, goal map, joint limits, step bounds) lands in
/// "chain-violation".
inline std::string cause_from_family(const std::string& family) {
  if (family == family::kCollisionObstacle || family == family::kCollisionSelf) {
    return cause::kCollision;
  }
  if (family.empty()) return "";
  return cause::kChain;
}

/// Classify an infeasible trajectory by the family of the EARLIEST violated
/// constraint along it, with collision taking precedence over kinematic
/// violations at the same step.  The goal map counts at the final step.
/// Returns "" when the trajectory is feasible.  This deliberately differs
/// from the checker's dominant_family (worst magnitude): a baseline that
/// drives into the swinging door mid-trajectory should read "collision"
/// even when a later handle-tracking error grows larger.
inline std::string first_violation_cause(const OptProblem& problem,
                                         const Trajectory& traj,
                                         Scalar slack = 1e-6) {
  const TrajoptParams& prm = problem.params;
  const Akr& akr = problem.akr;
  const Vec lo = akr.lower_limits();
  const Vec hi = akr.upper_limits();
  const Eigen::Index T = traj.rows();

  for (Eigen::Index t = 0; t < T; ++t) {
    const Vec q = traj.row(t).transpose();
    const auto [obstacle_sum, self_sum] =
        collision_sums(akr, problem.obstacles, q, prm.dist_safe);
    if (obstacle_sum > prm.xi_dist + slack || self_sum > prm.xi_dist + slack) {
      return cause::kCollision;
    }
    if (akr.chain_residual(q).norm() > prm.xi_chain + slack) {
      return cause::kChain;
    }
    if ((q - hi).maxCoeff() > slack || (lo - q).maxCoeff() > slack) {
      return cause::kChain;
    }
    if (t > 0) {
      const Vec dq = (traj.row(t) - traj.row(t - 1)).transpose();
      if (dq.lpNorm<Eigen::Infinity>() > prm.dq_max + slack) {
        return cause::kChain;
      }
    }
    if (t > 1) {
      const Vec ddq =
          (traj.row(t) - 2.0 * traj.row(t - 1) + traj.row(t - 2)).transpose();
      if (ddq.lpNorm<Eigen::Infinity>() > prm.ddq_max + slack) {
        return cause::kChain;
      }
    }
    if (t == T - 1 &&
        goal_residual(akr, problem.goal, q).norm() > prm.xi_goal + slack) {
      return cause::kChain;
    }
  }
  return "";
}

}  // namespace akplan
