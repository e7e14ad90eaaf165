// SPDX-License-Identifier: Apache-2.0
//
// Decoupled-planning baselines for single manipulation tasks, and the
// coordinated whole-body pipeline they are compared against.
//
// BL1 plans the mobile base alone (grid search + trajectory smoothing with
// the arm frozen), parks at a pose drawn from the task's feasible region,
// then tracks the handle with per-waypoint arm IK while the object follows a
// fixed linear schedule.  It never reasons about robot-object collisions.
// BL2 runs the same pipeline but re-optimizes the arm AND the object
// waypoint for collision clearance at every step, never re-planning the
// base.  The whole-body planner instead optimizes base, arm, and object
// jointly over the full horizon.
//
// No method grades itself: every produced trajectory is re-verified by the
// independent trajectory checker, and reported causes come from the
// earliest violated constraint.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "akplan/kinematics/akr.hpp"
#include "akplan/sampling/downsample.hpp"
#include "akplan/sampling/sample.hpp"
#include "akplan/scenario/metrics.hpp"
#include "akplan/scenario/scenario.hpp"
#include "akplan/trajopt/check.hpp"
#include "akplan/trajopt/solver.hpp"

namespace akplan {

/// Outcome of one single-task planning attempt.
struct TaskPlanResult {
  bool success{false};
  std::string cause;         // one of cause::* when success is false
  Trajectory approach;       // bare-robot rows: [base, arm]
  Trajectory manipulation;   // attached-model rows: [base, arm, object]
  Scalar base_effort_m{0.0};
  Scalar arm_effort_rad{0.0};
  Scalar plan_time_s{0.0};
};

namespace detail {

/// Copy of `arm` with every actuated joint welded at its value in `q_arm`.
/// Link poses of the frozen tree at the empty configuration match the
/// original tree's poses at `q_arm` exactly.
inline KinematicTree freeze_arm(const KinematicTree& arm, const Vec& q_arm) {
  std::vector<Link> links = arm.links();
  std::vector<Joint> joints = arm.joints();
  for (Joint& j : joints) {
    if (!j.is_dof()) continue;
    const Scalar v = q_arm[static_cast<Eigen::Index>(arm.dof_position(j.id))];
    j.origin = j.origin * j.motion(v);
    j.type = JointType::kFixed;
    j.lower = 0.0;
    j.upper = 0.0;
  }
  return KinematicTree::make(arm.root(), std::move(links), std::move(joints));
}

/// Seconds elapsed since `t0`.
inline Scalar seconds_since(
    const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - t0)
      .count();
}

/// Pose error target <- current as a 3-vector (dx, dy, wrapped dtheta).
inline Vec pose_error(const Pose2& current, const Pose2& target) {
  Vec e(3);
  e << current.x - target.x, current.y - target.y,
      wrap_angle(current.theta - target.theta);
  return e;
}

/// Damped Gauss-Newton arm IK at a fixed base pose: move only the arm
/// columns so the end effector reaches `ee_target`.  Warm-started from the
/// arm values already in `q`; iterates are clamped to the joint limits.
inline Vec arm_ik(const Akr& akr, Vec q, const Pose2& ee_target,
                  int iterations = 60) {
  const DofLayout& layout = akr.layout();
  const int a0 = layout.arm.begin;
  const int na = layout.arm.size();
  const Vec lo = akr.lower_limits();
  const Vec hi = akr.upper_limits();
  for (int it = 0; it < iterations; ++it) {
    const Vec r = pose_error(akr.link_pose(q, akr.ee_link()), ee_target);
    if (r.norm() < 1e-12) break;
    const Mat jac_full = akr.link_pose_jacobian(q, akr.ee_link());
    const Mat jac = jac_full.middleCols(a0, na);
    Mat normal = jac.transpose() * jac;
    normal.diagonal().array() += 1e-9;
    const Vec step = normal.ldlt().solve(-(jac.transpose() * r));
    q.segment(a0, na) += step;
    for (int i = a0; i < a0 + na; ++i) {
      q[i] = std::clamp(q[i], lo[i], hi[i]);
    }
    if (step.norm() < 1e-12) break;
  }
  return q;
}

/// Collision-aware refinement of one waypoint: minimizes
///   || ee - handle(s) ||^2 + w_goal (s - s_want)^2 + w_c hinge(clearance)^2
/// over the arm joints and the object joint value s, by damped coordinate
/// descent with numeric collision gradients.  `s` stays within
/// [s_floor, s_ceil].
inline void refine_waypoint(const Akr& akr,
                            const std::vector<PlacedShape>& obstacles,
                            Scalar dist_safe, const Pose2& grasp_offset,
                            const std::string& handle_link, Vec& q,
                            Scalar& s, Scalar s_want, Scalar s_floor,
                            Scalar s_ceil) {
  const DofLayout& layout = akr.layout();
  const int a0 = layout.arm.begin;
  const int na = layout.arm.size();
  const int so = layout.object.begin;  // single-dof objects: slot a0+na
  const Vec lo = akr.lower_limits();
  const Vec hi = akr.upper_limits();

  const Scalar w_goal = 4.0;
  const Scalar w_coll = 60.0;

  const auto energy = [&](const Vec& qq, Scalar ss) {
    Vec probe = qq;
    probe[so] = -ss;  // active object slots negate the source joint value
    const Pose2 handle = akr.link_pose(probe, handle_link);
    const Pose2 ee_target = handle * grasp_offset.inverse();
    const Vec r = pose_error(akr.link_pose(probe, akr.ee_link()), ee_target);
    const auto [co, cs] = collision_sums(akr, obstacles, probe, dist_safe);
    const Scalar dgoal = ss - s_want;
    return r.squaredNorm() + w_goal * dgoal * dgoal +
           w_coll * (co + cs) * (co + cs);
  };

  const Scalar h = 1e-4;
  Scalar step = 0.12;
  for (int it = 0; it < 30; ++it) {
    const Scalar e0 = energy(q, s);
    // Numeric gradient over [arm; s].
    Vec g(na + 1);
    for (int i = 0; i < na; ++i) {
      Vec qp = q;
      qp[a0 + i] = std::min(qp[a0 + i] + h, hi[a0 + i]);
      Vec qm = q;
      qm[a0 + i] = std::max(qm[a0 + i] - h, lo[a0 + i]);
      const Scalar denom = qp[a0 + i] - qm[a0 + i];
      g[i] = denom > 0.0 ? (energy(qp, s) - energy(qm, s)) / denom : 0.0;
    }
    {
      const Scalar sp = std::min(s + h, s_ceil);
      const Scalar sm = std::max(s - h, s_floor);
      const Scalar denom = sp - sm;
      g[na] = denom > 0.0 ? (energy(q, sp) - energy(q, sm)) / denom : 0.0;
    }
    const Scalar gn = g.norm();
    if (gn < 1e-10) break;

    bool improved = false;
    for (int bt = 0; bt < 8; ++bt) {
      Vec qt = q;
      for (int i = 0; i < na; ++i) {
        qt[a0 + i] = std::clamp(q[a0 + i] - step * g[i] / gn, lo[a0 + i],
                                hi[a0 + i]);
      }
      const Scalar st =
          std::clamp(s - step * g[na] / gn, s_floor, s_ceil);
      if (energy(qt, st) < e0) {
        q = qt;
        s = st;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved || step < 1e-5) break;
  }
  q[so] = -s;
}

/// Smooth a base-only motion to `park` with the arm welded at its current
/// values.  Returns the full-robot trajectory (arm columns constant), or an
/// empty trajectory with `cause` set.
inline std::optional<Trajectory> plan_base_alone(
    const Scenario& scn, const Vec& start, const Pose2& park,
    const std::vector<PlacedShape>& obstacles, std::string* cause) {
  const int n_arm = static_cast<int>(scn.arm.dof_count());
  const KinematicTree frozen = freeze_arm(scn.arm, start.tail(n_arm));
  const Akr akr = Akr::construct(scn.base, frozen, scn.ee_link);

  GoalSpec goal;
  goal.kind = GoalMapKind::kBasePose;
  goal.target = Vec(3);
  goal.target << park.x, park.y, park.theta;

  TrajoptParams params = scn.params;
  params.w_v = Vec();  // re-derive for the 3-dof model
  OptProblem problem =
      make_problem(akr, start.head(3), goal, obstacles, params);
  Vec park_cfg(3);
  park_cfg << park.x, park.y, park.theta;
  const SolveReport report = solve_with_astar_seed(
      problem, park_cfg, AstarSeedParams{scn.scene.grid_resolution, -1.0, 0.5});

  if (report.status == SolveStatus::kBudgetExceeded) {
    *cause = cause::kBudget;
    return std::nullopt;
  }
  if (report.status == SolveStatus::kInfeasible) {
    const std::string c = first_violation_cause(problem, report.trajectory);
    *cause = c.empty() ? cause::kNoPath : c;
    return std::nullopt;
  }

  Trajectory full(report.trajectory.rows(), 3 + n_arm);
  for (Eigen::Index t = 0; t < report.trajectory.rows(); ++t) {
    full.row(t).head(3) = report.trajectory.row(t);
    full.row(t).tail(n_arm) = start.tail(n_arm);
  }
  return full;
}

/// Independent verification of one phase; fills `cause` and returns false
/// when the checker rejects the trajectory.
inline bool verify_phase(const OptProblem& problem, const Trajectory& traj,
                         std::string* cause) {
  const TrajectoryCheck check = check_trajectory(problem, traj);
  if (check.feasible()) return true;
  const std::string c = first_violation_cause(problem, traj);
  *cause = c.empty() ? cause_from_family(check.dominant_family()) : c;
  return false;
}

}  // namespace detail

/// Shared BL1/BL2 pipeline; `collision_aware` switches the per-waypoint
/// refinement that distinguishes BL2 from BL1.
inline TaskPlanResult baseline_run(const Scenario& scn, const TaskSpec& task,
                                   const Vec& start, Rng& rng,
                                   bool collision_aware) {
  const auto t0 = std::chrono::steady_clock::now();
  TaskPlanResult out;

  require(!task.object.empty(), ErrorKind::kConfig,
          "baselines handle object-manipulation tasks");
  require(task.goal.kind == GoalKind::kObjectJoint, ErrorKind::kConfig,
          "baselines expect an object-joint goal");
  require(!task.feasible_region.empty(), ErrorKind::kConfig,
          "task '" + task.id + "' declares no feasible region");
  const SceneObject& obj = scn.scene.object(task.object);
  const Region& region = scn.scene.region(task.feasible_region);

  // Park pose drawn from the feasible region; face the handle unless the
  // region pins a heading.
  const Vec2 p = sample_in_region(region, rng);
  const Pose2 handle0 = obj.link_world(obj.attach_link);
  const Scalar heading =
      region.heading ? *region.heading
                     : std::atan2(handle0.y - p.y(), handle0.x - p.x());
  const Pose2 park{p.x(), p.y(), heading};

  // Phase 1: base path planned alone, everything (including the object at
  // its current state) treated as a static obstacle.
  const std::vector<PlacedShape> world = scene_obstacles(scn.scene);
  std::string fail_cause;
  const auto approach =
      detail::plan_base_alone(scn, start, park, world, &fail_cause);
  if (!approach) {
    out.cause = fail_cause;
    out.plan_time_s = detail::seconds_since(t0);
    return out;
  }
  out.approach = *approach;

  // Independent re-check of the approach on the articulated robot model.
  const Akr robot = robot_akr(scn);
  {
    GoalSpec goal;
    goal.kind = GoalMapKind::kBasePose;
    goal.target = Vec(3);
    goal.target << park.x, park.y, park.theta;
    TrajoptParams params = scn.params;
    params.w_v = Vec();
    const OptProblem approach_problem =
        make_problem(robot, start, goal, world, params);
    if (!detail::verify_phase(approach_problem, out.approach, &out.cause)) {
      out.plan_time_s = detail::seconds_since(t0);
      out.base_effort_m = base_effort(out.approach);
      out.arm_effort_rad = arm_effort(out.approach, robot.layout());
      return out;
    }
  }

  // Phase 2: arm tracks the handle while the object moves to its target;
  // the base stays parked.
  const Akr akr = attached_akr(scn, scn.scene, task.object);
  const DofLayout& layout = akr.layout();
  require(layout.object.size() == 1, ErrorKind::kConfig,
          "baselines expect a single-joint object");
  const int T = scn.params.waypoints;
  const std::string joint = task.goal.joint;
  const Scalar s_init = [&] {
    const auto it = obj.config.find(joint);
    return it == obj.config.end() ? 0.0 : it->second;
  }();
  const Scalar s_goal = task.goal.target;
  const std::vector<PlacedShape> manip_world =
      scene_obstacles(scn.scene, {task.object});

  Trajectory manip(T, akr.dof_count());
  Vec q = Vec::Zero(akr.dof_count());
  q.head(3) << park.x, park.y, park.theta;
  q.segment(layout.arm.begin, layout.arm.size()) =
      start.tail(layout.arm.size());
  Scalar s_prev = s_init;
  for (int t = 0; t < T; ++t) {
    const Scalar frac = T > 1 ? static_cast<Scalar>(t) / (T - 1) : 1.0;
    const Scalar s_want = s_init + frac * (s_goal - s_init);
    Scalar s = collision_aware ? std::max(s_prev, std::min(s_want, s_goal))
                               : s_want;
    q[layout.object.begin] = -s;

    // Arm IK to the grasp pose of the handle at the scheduled object state.
    const Pose2 handle = akr.link_pose(q, obj.attach_link);
    q = detail::arm_ik(akr, q, handle * obj.grasp_offset.inverse());

    if (collision_aware) {
      const Scalar lo_s = std::min(s_prev, s_goal);
      const Scalar hi_s = std::max(s_prev, s_goal);
      detail::refine_waypoint(akr, manip_world, scn.params.dist_safe,
                              obj.grasp_offset, obj.attach_link, q, s, s_want,
                              lo_s, hi_s);
      s_prev = s;
    }
    manip.row(t) = q.transpose();
  }
  out.manipulation = manip;

  // Independent verification of the manipulation phase.
  {
    GoalSpec goal;
    goal.kind = GoalMapKind::kObjectJoint;
    goal.joint = joint;
    goal.target = Vec::Constant(1, s_goal);
    TrajoptParams params = scn.params;
    params.w_v = Vec();
    const OptProblem manip_problem = make_problem(
        akr, manip.row(0).transpose(), goal, manip_world, params);
    const bool ok =
        detail::verify_phase(manip_problem, manip, &out.cause);
    out.success = ok;
  }

  out.base_effort_m = base_effort(out.approach) + base_effort(out.manipulation);
  out.arm_effort_rad = arm_effort(out.approach, robot.layout()) +
                       arm_effort(out.manipulation, layout);
  out.plan_time_s = detail::seconds_since(t0);
  return out;
}

inline TaskPlanResult baseline_bl1(const Scenario& scn, const TaskSpec& task,
                                   const Vec& start, Rng& rng) {
  return baseline_run(scn, task, start, rng, false);
}

inline TaskPlanResult baseline_bl2(const Scenario& scn, const TaskSpec& task,
                                   const Vec& start, Rng& rng) {
  return baseline_run(scn, task, start, rng, true);
}

namespace detail {

/// Travel cost between two configurations over shared base/arm segments:
/// squared weighted base delta (angle wrapped) plus squared arm delta.
inline Scalar travel_cost(const Vec& from_ba, const Vec& to_ba) {
  const Scalar dx = to_ba[0] - from_ba[0];
  const Scalar dy = to_ba[1] - from_ba[1];
  const Scalar dth = wrap_angle(to_ba[2] - from_ba[2]);
  Scalar cost = dx * dx + dy * dy + dth * dth;
  for (Eigen::Index i = 3; i < from_ba.size(); ++i) {
    const Scalar d = to_ba[i] - from_ba[i];
    cost += 0.5 * d * d;
  }
  return cost;
}

/// Sample goal configurations, down-sample, and return the travel-nearest
/// one from `from` (comparing shared base/arm segments).  Empty when
/// sampling found nothing.
inline std::optional<Vec> commit_goal_config(const Akr& akr,
                                             const GoalTemplate& goal,
                                             const Scene& scene,
                                             const std::vector<PlacedShape>& obstacles,
                                             const SampleParams& sampling,
                                             int n_k, const Vec& from_ba,
                                             Rng& rng) {
  ConfigSet set =
      sample_goal_configs(akr, goal, scene, obstacles, sampling, rng);
  if (set.configs.empty()) return std::nullopt;
  if (n_k > 0 && static_cast<int>(set.configs.size()) > n_k) {
    set = downsample(set, n_k, rng);
  }
  const Eigen::Index nba = from_ba.size();
  int best = 0;
  Scalar best_cost = kInf;
  for (std::size_t i = 0; i < set.configs.size(); ++i) {
    const Scalar c = travel_cost(from_ba, set.configs[i].head(nba));
    if (c < best_cost) {
      best_cost = c;
      best = static_cast<int>(i);
    }
  }
  return set.configs[static_cast<std::size_t>(best)];
}

}  // namespace detail

/// Whole-body single-task pipeline: sample a grasp configuration, drive the
/// bare robot to it, attach, sample a goal configuration on the combined
/// model, and solve the full-horizon problem with base, arm, and object
/// coupled.  Used as the coordinated-planning reference in benchmarks.
inline TaskPlanResult plan_manipulation_task(const Scenario& scn,
                                             const TaskSpec& task,
                                             const Vec& start, Rng& rng) {
  const auto t0 = std::chrono::steady_clock::now();
  TaskPlanResult out;
  require(!task.object.empty(), ErrorKind::kConfig,
          "manipulation task needs an object");

  const Akr robot = robot_akr(scn);
  const std::vector<PlacedShape> world = scene_obstacles(scn.scene);

  // Phase 1: reach the grasp.
  GoalTemplate grasp;
  grasp.kind = GoalKind::kGrasp;
  grasp.object = task.object;
  const auto grasp_commit = detail::commit_goal_config(
      robot, grasp, scn.scene, world, scn.sampling, scn.n_k, start, rng);
  if (!grasp_commit) {
    out.cause = cause::kChain;  // no valid grasp configuration found
    out.plan_time_s = detail::seconds_since(t0);
    return out;
  }
  {
    TrajoptParams params = scn.params;
    params.w_v = Vec();
    params.terminal_prior = *grasp_commit;
    OptProblem problem = make_problem(
        robot, start, instantiate_goal(grasp, scn.scene), world, params);
    const SolveReport report = solve_with_astar_seed(
        problem, *grasp_commit,
        AstarSeedParams{scn.scene.grid_resolution, -1.0, 0.5});
    if (report.status != SolveStatus::kConverged) {
      out.cause = report.status == SolveStatus::kBudgetExceeded
                      ? cause::kBudget
                      : [&] {
                          const std::string c = first_violation_cause(
                              problem, report.trajectory);
                          return c.empty() ? cause::kChain : c;
                        }();
      out.plan_time_s = detail::seconds_since(t0);
      return out;
    }
    out.approach = report.trajectory;
    if (!detail::verify_phase(problem, out.approach, &out.cause)) {
      out.plan_time_s = detail::seconds_since(t0);
      return out;
    }
  }

  // Phase 2: manipulate with the object attached.
  const Akr akr = attached_akr(scn, scn.scene, task.object);
  const SceneObject& obj = scn.scene.object(task.object);
  const DofLayout& layout = akr.layout();
  const std::vector<PlacedShape> manip_world =
      scene_obstacles(scn.scene, {task.object});

  Vec q0 = Vec::Zero(akr.dof_count());
  const Eigen::Index nba = out.approach.cols();
  q0.head(nba) = out.approach.row(out.approach.rows() - 1).transpose();
  q0.tail(layout.object.size()) = akr.object_segment(obj.config);

  const auto goal_commit = detail::commit_goal_config(
      akr, task.goal, scn.scene, manip_world, scn.sampling, scn.n_k,
      q0.head(nba), rng);
  if (!goal_commit) {
    out.cause = cause::kChain;
    out.plan_time_s = detail::seconds_since(t0);
    return out;
  }
  {
    TrajoptParams params = scn.params;
    params.w_v = Vec();
    params.terminal_prior = *goal_commit;
    OptProblem problem = make_problem(
        akr, q0, instantiate_goal(task.goal, scn.scene), manip_world, params);
    const SolveReport report = solve_with_astar_seed(
        problem, *goal_commit,
        AstarSeedParams{scn.scene.grid_resolution, -1.0, 0.5});
    if (report.status != SolveStatus::kConverged) {
      out.cause = report.status == SolveStatus::kBudgetExceeded
                      ? cause::kBudget
                      : [&] {
                          const std::string c = first_violation_cause(
                              problem, report.trajectory);
                          return c.empty() ? cause::kChain : c;
                        }();
      out.plan_time_s = detail::seconds_since(t0);
      return out;
    }
    out.manipulation = report.trajectory;
    if (!detail::verify_phase(problem, out.manipulation, &out.cause)) {
      out.plan_time_s = detail::seconds_since(t0);
      return out;
    }
  }

  out.success = true;
  out.base_effort_m =
      base_effort(out.approach) + base_effort(out.manipulation);
  out.arm_effort_rad = arm_effort(out.approach, robot.layout()) +
                       arm_effort(out.manipulation, layout);
  out.plan_time_s = detail::seconds_since(t0);
  return out;
}

}  // namespace akplan
