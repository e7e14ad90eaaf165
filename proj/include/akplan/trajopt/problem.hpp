// SPDX-License-Identifier: Apache-2.0
//
// Problem definition for A-Space trajectory optimization: decision variables
// are the waypoints of a T-step configuration-space path of an AKR.  The
// objective penalizes travel and non-smoothness; constraints keep the
// kinematic chain closed, reach the task goal, respect joint/velocity/
// acceleration limits, and bound per-step collision penetration sums.
#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "akplan/common.hpp"
#include "akplan/geometry/distance.hpp"
#include "akplan/geometry/shapes.hpp"
#include "akplan/kinematics/akr.hpp"

namespace akplan {

/// Task goal space: where f_task maps the terminal configuration.
enum class GoalMapKind {
  kEePose,       // world pose of the end-effector link
  kObjectJoint,  // value of one active object joint
  kBasePose,     // world pose of the base footprint link
};

struct GoalSpec {
  GoalMapKind kind{GoalMapKind::kBasePose};
  /// Target in goal space: masked (x, y, theta) components for pose kinds,
  /// a single joint value for kObjectJoint.
  Vec target;
  /// Which pose components participate (pose kinds only).
  std::array<bool, 3> pose_mask{true, true, true};
  /// Active joint name (kObjectJoint only).
  std::string joint;

  [[nodiscard]] int dim() const {
    if (kind == GoalMapKind::kObjectJoint) return 1;
    int d = 0;
    for (const bool b : pose_mask) d += b ? 1 : 0;
    return d;
  }
};

/// Solver and constraint parameters.  Defaults follow the repo's standard
/// configuration; scenario files may override any of them.
struct TrajoptParams {
  int waypoints{30};  // T
  Scalar xi_goal{1e-4};
  Scalar xi_chain{1e-3};
  Scalar xi_dist{1e-3};
  Scalar dist_safe{0.05};
  Vec w_v;  // per-dof diagonal of W_v
  Vec w_a;  // per-dof diagonal of W_a
  Scalar dq_max{0.5};    // per-step velocity bound, infinity norm
  Scalar ddq_max{0.5};   // per-step acceleration bound, infinity norm
  int max_outer{60};
  Scalar time_budget_s{300.0};
  /// Optional soft pull of the terminal waypoint toward a full goal
  /// configuration (used when a sampled goal should anchor the solve; the
  /// hard terminal constraint remains the goal-space tolerance).  Empty
  /// disables the term.
  Vec terminal_prior;
  Scalar terminal_prior_weight{0.1};
};

/// Travel weights 1 for the virtual base, 0.5 for arm and object joints;
/// smoothness weight 0.1 everywhere.
inline void default_weights(const Akr& akr, TrajoptParams* params) {
  const int n = akr.dof_count();
  params->w_v = Vec::Constant(n, 0.5);
  params->w_v.head(3).setOnes();
  params->w_a = Vec::Constant(n, 0.1);
}

struct OptProblem {
  Akr akr;
  Vec start;  // q_1, pinned
  GoalSpec goal;
  TrajoptParams params;
  std::vector<PlacedShape> obstacles;

  [[nodiscard]] int dofs() const { return akr.dof_count(); }
};

inline OptProblem make_problem(Akr akr, Vec start, GoalSpec goal,
                               std::vector<PlacedShape> obstacles = {},
                               TrajoptParams params = {}) {
  if (params.w_v.size() == 0) default_weights(akr, &params);
  require(params.waypoints >= 3, ErrorKind::kConfig, "need at least 3 waypoints");
  require(params.xi_goal > 0 && params.xi_chain > 0 && params.xi_dist > 0,
          ErrorKind::kConfig, "tolerances must be positive");
  require(start.size() == akr.dof_count(), ErrorKind::kDimension,
          "start configuration size mismatch");
  require(goal.target.size() == goal.dim(), ErrorKind::kDimension,
          "goal target size does not match the goal map");
  OptProblem p{std::move(akr), std::move(start), std::move(goal),
               std::move(params), std::move(obstacles)};
  require(p.params.w_v.size() == p.akr.dof_count() &&
              p.params.w_a.size() == p.akr.dof_count(),
          ErrorKind::kDimension, "weight vector size mismatch");
  return p;
}

/// f_task(q) - g, with angular components wrapped.  Uses `fk` when supplied
/// to avoid recomputing kinematics.
inline Vec goal_residual(const Akr& akr, const GoalSpec& goal, const Vec& q,
                         const FkResult* fk = nullptr) {
  if (goal.kind == GoalMapKind::kObjectJoint) {
    const auto& names = akr.dof_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == goal.joint) {
        // Active object values carry the inverted sign; report the original
        // object convention so targets read like the object model.
        const bool object_dof =
            static_cast<int>(i) >= akr.layout().object.begin;
        const Scalar value = object_dof ? -q[static_cast<Eigen::Index>(i)]
                                        : q[static_cast<Eigen::Index>(i)];
        Vec r(1);
        r[0] = value - goal.target[0];
        return r;
      }
    }
    fail(ErrorKind::kConfig, "goal joint is not an active dof: " + goal.joint);
  }
  const std::string& link =
      goal.kind == GoalMapKind::kEePose ? akr.ee_link() : akr.base_link();
  const Pose2 pose = fk != nullptr
                         ? fk->link_pose[akr.tree().link_index(link)]
                         : akr.link_pose(q, link);
  Vec full(3);
  full << pose.x, pose.y, pose.theta;
  Vec r(goal.dim());
  int k = 0;
  int ti = 0;
  for (int c = 0; c < 3; ++c) {
    if (!goal.pose_mask[static_cast<std::size_t>(c)]) continue;
    const Scalar g = goal.target[ti++];
    r[k++] = c == 2 ? angle_diff(full[c], g) : full[c] - g;
  }
  return r;
}

/// Jacobian of goal_residual w.r.t. the active configuration.
inline Mat goal_jacobian(const Akr& akr, const GoalSpec& goal, const Vec& q) {
  if (goal.kind == GoalMapKind::kObjectJoint) {
    Mat j = Mat::Zero(1, akr.dof_count());
    const auto& names = akr.dof_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == goal.joint) {
        const bool object_dof =
            static_cast<int>(i) >= akr.layout().object.begin;
        j(0, static_cast<Eigen::Index>(i)) = object_dof ? -1.0 : 1.0;
        return j;
      }
    }
    fail(ErrorKind::kConfig, "goal joint is not an active dof: " + goal.joint);
  }
  const std::string& link =
      goal.kind == GoalMapKind::kEePose ? akr.ee_link() : akr.base_link();
  const Mat jp = akr.link_pose_jacobian(q, link);
  Mat j(goal.dim(), akr.dof_count());
  int k = 0;
  for (int c = 0; c < 3; ++c) {
    if (goal.pose_mask[static_cast<std::size_t>(c)]) j.row(k++) = jp.row(c);
  }
  return j;
}

/// Per-step collision penetration sums: (obstacle sum, self sum) of
/// |dist_safe - sd|^+ over link-obstacle pairs and the AKR self-pair set.
inline std::pair<Scalar, Scalar> collision_sums(
    const Akr& akr, const std::vector<PlacedShape>& obstacles, const Vec& q,
    Scalar dist_safe) {
  const FkResult fk = akr.fk(q);
  const auto bodies = akr.bodies_from_fk(fk);
  Scalar obs_sum = 0.0;
  for (const AkrBody& b : bodies) {
    const ConvexShape& shape = akr.link_shape(b.link);
    for (const PlacedShape& o : obstacles) {
      const Scalar centers =
          (b.pose.translation() - o.pose.translation()).norm();
      if (centers - shape.bounding_radius() - o.shape.bounding_radius() >
          dist_safe) {
        continue;
      }
      const Scalar sd = signed_distance(shape, b.pose, o.shape, o.pose);
      obs_sum += std::max(0.0, dist_safe - sd);
    }
  }
  Scalar self_sum = 0.0;
  for (const auto& [la, lb] : akr.self_pairs()) {
    const ConvexShape& sa = akr.link_shape(la);
    const ConvexShape& sb = akr.link_shape(lb);
    const Pose2& pa = fk.link_pose[la];
    const Pose2& pb = fk.link_pose[lb];
    const Scalar centers = (pa.translation() - pb.translation()).norm();
    if (centers - sa.bounding_radius() - sb.bounding_radius() > dist_safe) {
      continue;
    }
    const Scalar sd = signed_distance(sa, pa, sb, pb);
    self_sum += std::max(0.0, dist_safe - sd);
  }
  return {obs_sum, self_sum};
}

}  // namespace akplan
