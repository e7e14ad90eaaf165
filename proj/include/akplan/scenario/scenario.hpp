// SPDX-License-Identifier: Apache-2.0
//
// Scenario = scene + robot + tasks + parameter overrides, loaded from one
// JSON document.  A scenario also carries "sites": named motion-goal
// templates that ground symbolic plan arguments (a placement region, a
// handle's target joint value, a navigation pose) into goal maps.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "akplan/common.hpp"
#include "akplan/kinematics/akr.hpp"
#include "akplan/sampling/sample.hpp"
#include "akplan/scenario/scene.hpp"
#include "akplan/trajopt/problem.hpp"

namespace akplan {

/// What a motion goal means before it is bound to the current scene state.
/// Region kinds draw a fresh target from the region per sampling restart;
/// the other kinds resolve to a single fixed goal map.
enum class GoalKind {
  kObjectJoint,   // drive one object joint to a value (open door / drawer)
  kObjectPose,    // place the grasped link at an exact world pose
  kObjectRegion,  // place the grasped link anywhere inside a region
  kBasePose,      // park the base at an exact pose
  kBaseRegion,    // park the base anywhere inside a region
  kGrasp,         // put the end effector at an object's grasp pose
  kEePoint,       // end-effector position target (orientation free)
};

struct GoalTemplate {
  GoalKind kind{GoalKind::kBasePose};
  std::string object;            // object-*, grasp
  std::string joint;             // object-joint
  Scalar target{0.0};            // object-joint value
  Pose2 pose;                    // object-pose / base-pose
  std::string region;            // *-region
  std::optional<Scalar> theta;   // fixed orientation for region kinds
  Vec2 point{0.0, 0.0};          // ee-point position

  /// True when every sampling restart pursues the same goal map.
  [[nodiscard]] bool fixed() const {
    return kind != GoalKind::kObjectRegion && kind != GoalKind::kBaseRegion;
  }
};

/// One benchmarkable task of a scenario.
struct TaskSpec {
  std::string id;
  std::string object;           // manipulated object ("" = navigation only)
  GoalTemplate goal;
  std::string feasible_region;  // baseline parking region
};

/// Where the robot starts: either a fixed configuration or a sampled base
/// pose inside a region with the arm at `arm`.
struct StartSpec {
  Vec config;                    // full [base; arm] configuration, or empty
  std::string region;
  std::optional<Scalar> heading; // fixed base orientation; nullopt = uniform
  Vec arm;                       // arm joint values, or empty for zeros
};

struct Scenario {
  std::string name;
  Scene scene;
  KinematicTree base;
  KinematicTree arm;
  std::string ee_link;
  VirtualBaseLimits base_limits;
  StartSpec start;
  TrajoptParams params;
  SampleParams sampling;
  // Refinement defaults (overridable per CLI flags).
  int window{2};
  int n_k{8};
  int retries{5};
  bool downsample{true};
  std::vector<TaskSpec> tasks;
  std::map<std::string, GoalTemplate> sites;

  [[nodiscard]] const TaskSpec& task(const std::string& id) const {
    for (const TaskSpec& t : tasks) {
      if (t.id == id) return t;
    }
    fail(ErrorKind::kLookup, "scenario has no task named '" + id + "'");
  }

  [[nodiscard]] const GoalTemplate& site(const std::string& name_) const {
    const auto it = sites.find(name_);
    require(it != sites.end(), ErrorKind::kLookup,
            "scenario has no site named '" + name_ + "'");
    return it->second;
  }
};

/// The bare robot: virtual base + manipulator, nothing attached.
inline Akr robot_akr(const Scenario& scn) {
  return Akr::construct(scn.base, scn.arm, scn.ee_link);
}

/// Robot holding `object_id` as the scene currently poses it.
inline Akr attached_akr(const Scenario& scn, const Scene& scene,
                        const std::string& object_id) {
  const SceneObject& obj = scene.object(object_id);
  require(!obj.attach_link.empty(), ErrorKind::kConfig,
          "object '" + object_id + "' declares no attach_link");
  ObjectAttachment att;
  att.object_id = obj.id;
  att.model = obj.model;
  att.spec = AttachmentSpec{scn.ee_link, obj.attach_link, obj.grasp_offset};
  att.root_pose = obj.root_pose;
  att.anchored = obj.anchored;
  att.anchor_mask = obj.anchor_mask;
  att.config = obj.config;
  return Akr::construct(scn.base, scn.arm, scn.ee_link, std::move(att));
}

/// Start configuration for the bare robot AKR.  Draws the base pose from the
/// start region when no fixed configuration is given.
inline Vec sample_start(const Scenario& scn, Rng& rng) {
  const int n_arm = static_cast<int>(scn.arm.dof_count());
  if (scn.start.config.size() > 0) {
    require(scn.start.config.size() == 3 + n_arm, ErrorKind::kDimension,
            "start configuration size does not match the robot");
    return scn.start.config;
  }
  require(!scn.start.region.empty(), ErrorKind::kConfig,
          "scenario start needs either a configuration or a region");
  const Region& region = scn.scene.region(scn.start.region);
  const Vec2 p = sample_in_region(region, rng);
  Scalar theta;
  if (scn.start.heading) {
    theta = *scn.start.heading;
  } else if (region.heading) {
    theta = *region.heading;
  } else {
    theta = rng.uniform(-kPi, kPi);
  }
  Vec q = Vec::Zero(3 + n_arm);
  q[0] = p.x();
  q[1] = p.y();
  q[2] = theta;
  if (scn.start.arm.size() > 0) {
    require(scn.start.arm.size() == n_arm, ErrorKind::kDimension,
            "start arm configuration size does not match the arm");
    q.tail(n_arm) = scn.start.arm;
  }
  return q;
}

/// Resolve a goal template against the current scene state.  Region kinds
/// draw their target with `rng`; fixed kinds ignore it.
inline GoalSpec instantiate_goal(const GoalTemplate& t, const Scene& scene,
                                 Rng* rng = nullptr) {
  GoalSpec g;
  switch (t.kind) {
    case GoalKind::kObjectJoint: {
      g.kind = GoalMapKind::kObjectJoint;
      g.joint = t.joint;
      g.target = Vec::Constant(1, t.target);
      return g;
    }
    case GoalKind::kBasePose: {
      g.kind = GoalMapKind::kBasePose;
      g.target = Vec(3);
      g.target << t.pose.x, t.pose.y, t.pose.theta;
      return g;
    }
    case GoalKind::kBaseRegion: {
      require(rng != nullptr, ErrorKind::kConfig,
              "region goal requires a random stream");
      const Region& region = scene.region(t.region);
      const Vec2 p = sample_in_region(region, *rng);
      g.kind = GoalMapKind::kBasePose;
      std::optional<Scalar> theta = t.theta;
      if (!theta && region.heading) theta = region.heading;
      if (theta) {
        g.target = Vec(3);
        g.target << p.x(), p.y(), *theta;
      } else {
        g.pose_mask = {true, true, false};
        g.target = Vec(2);
        g.target << p.x(), p.y();
      }
      return g;
    }
    case GoalKind::kObjectPose:
    case GoalKind::kObjectRegion: {
      const SceneObject& obj = scene.object(t.object);
      Pose2 link_target;
      if (t.kind == GoalKind::kObjectPose) {
        link_target = t.pose;
      } else {
        require(rng != nullptr, ErrorKind::kConfig,
                "region goal requires a random stream");
        const Region& region = scene.region(t.region);
        const Vec2 p = sample_in_region(region, *rng);
        Scalar theta;
        if (t.theta) {
          theta = *t.theta;
        } else if (region.heading) {
          theta = *region.heading;
        } else {
          theta = rng->uniform(-kPi, kPi);
        }
        link_target = Pose2{p.x(), p.y(), theta};
      }
      // The grasped link rides the gripper rigidly, so a pose goal for the
      // link is exactly an end-effector pose goal.
      const Pose2 ee_target = link_target * obj.grasp_offset.inverse();
      g.kind = GoalMapKind::kEePose;
      g.target = Vec(3);
      g.target << ee_target.x, ee_target.y, ee_target.theta;
      return g;
    }
    case GoalKind::kGrasp: {
      const SceneObject& obj = scene.object(t.object);
      require(!obj.attach_link.empty(), ErrorKind::kConfig,
              "object '" + obj.id + "' declares no attach_link");
      const Pose2 ee_target =
          obj.link_world(obj.attach_link) * obj.grasp_offset.inverse();
      g.kind = GoalMapKind::kEePose;
      g.target = Vec(3);
      g.target << ee_target.x, ee_target.y, ee_target.theta;
      return g;
    }
    case GoalKind::kEePoint: {
      g.kind = GoalMapKind::kEePose;
      g.pose_mask = {true, true, false};
      g.target = Vec(2);
      g.target << t.point.x(), t.point.y();
      return g;
    }
  }
  fail(ErrorKind::kConfig, "unhandled goal template kind");
}

/// Goal-sampling entry point for scenario goals: fixed templates behave like
/// the plain fixed-goal sampler; region templates redraw their target per
/// restart so the accepted set spreads over the region.
inline ConfigSet sample_goal_configs(const Akr& akr, const GoalTemplate& t,
                                     const Scene& scene,
                                     const std::vector<PlacedShape>& obstacles,
                                     const SampleParams& params, Rng& rng) {
  if (t.fixed()) {
    const GoalSpec fixed = instantiate_goal(t, scene);
    return sample_valid_configurations(akr, fixed, obstacles, params, rng);
  }
  return sample_valid_configurations_each(
      akr,
      [&t, &scene](Rng& r) { return instantiate_goal(t, scene, &r); },
      obstacles, params, rng);
}

namespace detail {

inline GoalTemplate parse_goal_template(const Json& obj,
                                        const std::string& path) {
  GoalTemplate t;
  const std::string kind = get_string(obj, path, "kind");
  if (kind == "object-joint") {
    t.kind = GoalKind::kObjectJoint;
    t.object = get_string(obj, path, "object");
    t.joint = get_string(obj, path, "joint");
    t.target = get_number(obj, path, "target");
  } else if (kind == "object-pose") {
    t.kind = GoalKind::kObjectPose;
    t.object = get_string(obj, path, "object");
    t.pose = get_pose(obj, path, "pose");
  } else if (kind == "object-region") {
    t.kind = GoalKind::kObjectRegion;
    t.object = get_string(obj, path, "object");
    t.region = get_string(obj, path, "region");
    if (obj.find("theta") != obj.end()) {
      t.theta = get_number(obj, path, "theta");
    }
  } else if (kind == "base-pose") {
    t.kind = GoalKind::kBasePose;
    t.pose = get_pose(obj, path, "pose");
  } else if (kind == "base-region") {
    t.kind = GoalKind::kBaseRegion;
    t.region = get_string(obj, path, "region");
    if (obj.find("theta") != obj.end()) {
      t.theta = get_number(obj, path, "theta");
    }
  } else if (kind == "grasp") {
    t.kind = GoalKind::kGrasp;
    t.object = get_string(obj, path, "object");
  } else if (kind == "ee-point") {
    t.kind = GoalKind::kEePoint;
    const auto p = get_numbers(get_field(obj, path, "point"),
                               path + ".point", 2);
    t.point = Vec2{p[0], p[1]};
  } else {
    fail_schema(path + ".kind", "unknown goal kind '" + kind + "'");
  }
  return t;
}

/// Referential integrity of a goal template against the parsed scene.
inline void check_goal_refs(const GoalTemplate& t, const Scene& scene,
                            const std::string& path) {
  if (!t.object.empty() && !scene.has_object(t.object)) {
    fail_schema(path + ".object",
                "reference to undeclared object '" + t.object + "'");
  }
  if (!t.region.empty() && !scene.has_region(t.region)) {
    fail_schema(path + ".region",
                "reference to undeclared region '" + t.region + "'");
  }
  if (t.kind == GoalKind::kObjectJoint) {
    const SceneObject& obj = scene.object(t.object);
    if (!obj.model.has_joint(t.joint)) {
      fail_schema(path + ".joint", "object '" + t.object +
                                       "' has no joint named '" + t.joint +
                                       "'");
    }
  }
}

}  // namespace detail

inline Scenario parse_scenario(const Json& doc, const std::string& base_dir,
                               const std::string& path = "scenario") {
  Scenario scn;
  scn.name = get_string_or(doc, path, "name", "");

  // Scene: inline document or a relative file reference.
  const Json& scene_field = get_field(doc, path, "scene");
  if (scene_field.is_string()) {
    const std::string file =
        detail::join_path(base_dir, scene_field.get<std::string>());
    scn.scene = parse_scene(load_json_file(file), detail::dirname_of(file),
                            file);
  } else {
    scn.scene = parse_scene(scene_field, base_dir, path + ".scene");
  }

  const Json& robot = get_field(doc, path, "robot");
  const std::string rpath = path + ".robot";
  const ConvexShape footprint = parse_shape(
      get_field(robot, rpath, "footprint"), rpath + ".footprint");
  if (robot.is_object() && robot.find("limits") != robot.end()) {
    const Json& lim = robot.at("limits");
    const std::string lpath = rpath + ".limits";
    if (!lim.is_object()) fail_schema(lpath, "expected an object");
    const auto pair = [&](const char* key, Scalar& lo, Scalar& hi) {
      if (lim.find(key) == lim.end()) return;
      const auto v = get_numbers(get_field(lim, lpath, key),
                                 lpath + "." + key, 2);
      lo = v[0];
      hi = v[1];
    };
    pair("x", scn.base_limits.x_min, scn.base_limits.x_max);
    pair("y", scn.base_limits.y_min, scn.base_limits.y_max);
    pair("theta", scn.base_limits.theta_min, scn.base_limits.theta_max);
  }
  scn.base = make_virtual_base(footprint, Pose2::identity(), scn.base_limits);
  const Json& arm_ref = get_field(robot, rpath, "arm");
  if (arm_ref.is_string()) {
    const std::string file =
        detail::join_path(base_dir, arm_ref.get<std::string>());
    scn.arm = parse_model(load_json_file(file), file).tree;
  } else {
    scn.arm = parse_model(arm_ref, rpath + ".arm").tree;
  }
  scn.ee_link = get_string(robot, rpath, "ee_link");
  if (!scn.arm.has_link(scn.ee_link)) {
    fail_schema(rpath + ".ee_link",
                "arm has no link named '" + scn.ee_link + "'");
  }

  if (doc.find("start") != doc.end()) {
    const Json& start = doc.at("start");
    const std::string spath = path + ".start";
    if (!start.is_object()) fail_schema(spath, "expected an object");
    if (start.find("config") != start.end()) {
      const Json& cfg = get_array(start, spath, "config", 3);
      scn.start.config = Vec(static_cast<Eigen::Index>(cfg.size()));
      for (std::size_t i = 0; i < cfg.size(); ++i) {
        if (!cfg[i].is_number()) {
          fail_schema(spath + ".config[" + std::to_string(i) + "]",
                      "expected a number");
        }
        scn.start.config[static_cast<Eigen::Index>(i)] = cfg[i].get<Scalar>();
      }
    }
    scn.start.region = get_string_or(start, spath, "region", "");
    if (!scn.start.region.empty() && !scn.scene.has_region(scn.start.region)) {
      fail_schema(spath + ".region", "reference to undeclared region '" +
                                         scn.start.region + "'");
    }
    if (start.find("heading") != start.end()) {
      scn.start.heading = get_number(start, spath, "heading");
    }
    if (start.find("arm") != start.end()) {
      const Json& arm = get_array(start, spath, "arm");
      scn.start.arm = Vec(static_cast<Eigen::Index>(arm.size()));
      for (std::size_t i = 0; i < arm.size(); ++i) {
        if (!arm[i].is_number()) {
          fail_schema(spath + ".arm[" + std::to_string(i) + "]",
                      "expected a number");
        }
        scn.start.arm[static_cast<Eigen::Index>(i)] = arm[i].get<Scalar>();
      }
    }
  }

  if (doc.find("params") != doc.end()) {
    const Json& p = doc.at("params");
    const std::string ppath = path + ".params";
    if (!p.is_object()) fail_schema(ppath, "expected an object");
    scn.params.waypoints = static_cast<int>(
        get_number_or(p, ppath, "waypoints", scn.params.waypoints));
    scn.params.xi_goal = get_number_or(p, ppath, "xi_goal", scn.params.xi_goal);
    scn.params.xi_chain =
        get_number_or(p, ppath, "xi_chain", scn.params.xi_chain);
    scn.params.xi_dist = get_number_or(p, ppath, "xi_dist", scn.params.xi_dist);
    scn.params.dist_safe =
        get_number_or(p, ppath, "dist_safe", scn.params.dist_safe);
    scn.params.dq_max = get_number_or(p, ppath, "dq_max", scn.params.dq_max);
    scn.params.ddq_max = get_number_or(p, ppath, "ddq_max", scn.params.ddq_max);
    scn.params.max_outer = static_cast<int>(
        get_number_or(p, ppath, "max_outer", scn.params.max_outer));
    scn.params.time_budget_s =
        get_number_or(p, ppath, "time_budget_s", scn.params.time_budget_s);
  }

  if (doc.find("sampling") != doc.end()) {
    const Json& s = doc.at("sampling");
    const std::string spath = path + ".sampling";
    if (!s.is_object()) fail_schema(spath, "expected an object");
    scn.sampling.n_c =
        static_cast<int>(get_number_or(s, spath, "n_c", scn.sampling.n_c));
    scn.sampling.max_tries = static_cast<int>(
        get_number_or(s, spath, "max_tries", scn.sampling.max_tries));
    scn.sampling.xi_chain =
        get_number_or(s, spath, "xi_chain", scn.sampling.xi_chain);
    scn.sampling.xi_goal =
        get_number_or(s, spath, "xi_goal", scn.sampling.xi_goal);
    scn.sampling.dist_safe =
        get_number_or(s, spath, "dist_safe", scn.sampling.dist_safe);
    scn.sampling.xi_dist =
        get_number_or(s, spath, "xi_dist", scn.sampling.xi_dist);
  }

  if (doc.find("refine") != doc.end()) {
    const Json& r = doc.at("refine");
    const std::string rpath2 = path + ".refine";
    if (!r.is_object()) fail_schema(rpath2, "expected an object");
    scn.window =
        static_cast<int>(get_number_or(r, rpath2, "window", scn.window));
    scn.n_k = static_cast<int>(get_number_or(r, rpath2, "n_k", scn.n_k));
    scn.retries =
        static_cast<int>(get_number_or(r, rpath2, "retries", scn.retries));
    scn.downsample = get_bool_or(r, rpath2, "downsample", scn.downsample);
  }

  if (doc.find("tasks") != doc.end()) {
    const Json& arr = get_array(doc, path, "tasks");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string tpath = path + ".tasks[" + std::to_string(i) + "]";
      TaskSpec task;
      task.id = get_string(arr[i], tpath, "id");
      task.object = get_string_or(arr[i], tpath, "object", "");
      if (!task.object.empty() && !scn.scene.has_object(task.object)) {
        fail_schema(tpath + ".object",
                    "reference to undeclared object '" + task.object + "'");
      }
      task.goal = detail::parse_goal_template(
          get_field(arr[i], tpath, "goal"), tpath + ".goal");
      detail::check_goal_refs(task.goal, scn.scene, tpath + ".goal");
      task.feasible_region =
          get_string_or(arr[i], tpath, "feasible_region", "");
      if (!task.feasible_region.empty() &&
          !scn.scene.has_region(task.feasible_region)) {
        fail_schema(tpath + ".feasible_region",
                    "reference to undeclared region '" + task.feasible_region +
                        "'");
      }
      scn.tasks.push_back(std::move(task));
    }
  }

  if (doc.find("sites") != doc.end()) {
    const Json& sites = doc.at("sites");
    if (!sites.is_object()) {
      fail_schema(path + ".sites", "expected an object of goal templates");
    }
    for (auto it = sites.begin(); it != sites.end(); ++it) {
      const std::string spath = path + ".sites." + it.key();
      GoalTemplate t = detail::parse_goal_template(it.value(), spath);
      detail::check_goal_refs(t, scn.scene, spath);
      scn.sites[it.key()] = std::move(t);
    }
  }

  return scn;
}

inline Scenario load_scenario(const std::string& file) {
  return parse_scenario(load_json_file(file), detail::dirname_of(file), file);
}

}  // namespace akplan
