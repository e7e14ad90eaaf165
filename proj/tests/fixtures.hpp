// SPDX-License-Identifier: Apache-2.0
//
// Shared test fixtures: a circular-base robot with a 3-revolute planar arm,
// a hinged door, and a sliding drawer, plus helpers that assemble consistent
// attachment states (end effector placed at the grasp, chain residual zero).
#pragma once

#include <string>
#include <vector>

#include "akplan/geometry/shapes.hpp"
#include "akplan/kinematics/akr.hpp"
#include "akplan/kinematics/tree.hpp"

namespace akplan::testfx {

/// Box extending forward from the link origin: x in [0, length],
/// y in [-width/2, width/2].
inline ConvexShape forward_box(Scalar length, Scalar width) {
  const Scalar h = width / 2.0;
  return ConvexShape::polygon(
      {{0.0, -h}, {length, -h}, {length, h}, {0.0, h}});
}

inline KinematicTree base_tree() {
  return make_virtual_base(ConvexShape::circle(0.3));
}

/// Three-revolute planar arm; link boxes extend forward so the stretched arm
/// is collision-consistent.
inline KinematicTree arm_tree() {
  std::vector<Link> links{{"arm_base", std::nullopt},
                          {"l1", forward_box(0.4, 0.08)},
                          {"l2", forward_box(0.35, 0.07)},
                          {"ee", forward_box(0.1, 0.05)}};
  std::vector<Joint> joints{
      {"shoulder", "arm_base", "l1", JointType::kRevolute, Pose2{}, {1, 0},
       -2.6, 2.6},
      {"elbow", "l1", "l2", JointType::kRevolute, Pose2{0.4, 0.0, 0.0}, {1, 0},
       -2.6, 2.6},
      {"wrist", "l2", "ee", JointType::kRevolute, Pose2{0.35, 0.0, 0.0}, {1, 0},
       -2.6, 2.6}};
  return KinematicTree::make("arm_base", std::move(links), std::move(joints));
}

/// Hinged door: fixed frame post, swinging panel, handle near the free edge.
inline KinematicTree door_tree() {
  std::vector<Link> links{{"frame", ConvexShape::box(0.1, 0.1)},
                          {"panel", forward_box(0.9, 0.06)},
                          {"handle", ConvexShape::circle(0.04)}};
  std::vector<Joint> joints{
      {"hinge", "frame", "panel", JointType::kRevolute, Pose2{0.1, 0.0, 0.0},
       {1, 0}, 0.0, 1.9},
      {"mount", "panel", "handle", JointType::kFixed, Pose2{0.8, -0.08, 0.0},
       {1, 0}, 0.0, 0.0}};
  return KinematicTree::make("frame", std::move(links), std::move(joints));
}

/// Sliding drawer: cabinet body, tray on a prismatic rail, knob on the tray
/// face.
inline KinematicTree drawer_tree() {
  std::vector<Link> links{{"cabinet", ConvexShape::box(0.5, 0.4)},
                          {"tray", ConvexShape::box(0.4, 0.3)},
                          {"knob", ConvexShape::circle(0.03)}};
  std::vector<Joint> joints{
      {"slide", "cabinet", "tray", JointType::kPrismatic, Pose2{}, {1, 0}, 0.0,
       0.45},
      {"knob_mount", "tray", "knob", JointType::kFixed, Pose2{0.25, 0.0, 0.0},
       {1, 0}, 0.0, 0.0}};
  return KinematicTree::make("cabinet", std::move(links), std::move(joints));
}

/// An AKR with an attached articulated object plus a configuration at which
/// the chain residual is exactly zero (robot placed so the end effector sits
/// at the grasp offset from the grasped link).
struct AttachedFixture {
  Akr akr;
  Vec consistent_q;          // zero chain residual
  Pose2 root_world;          // anchored object root pose
  Scalar joint_value;        // object joint value at attachment
  KinematicTree object;      // original (uninverted) object model
  std::string grasped_link;  // link held by the end effector
  std::string object_joint;  // the single moving joint of the object
  Pose2 grasp;               // end-effector frame -> grasped-link frame
};

/// Goal configuration reached by carrying the base rigidly with the grasp:
/// the arm stays stretched (all zeros, end effector 0.75 ahead of the base)
/// and the base is placed so the end effector meets the grasp pose at the
/// requested object joint value.  Zero chain residual by construction.
inline Vec rigid_transfer_goal(const AttachedFixture& fx, Scalar target) {
  Vec qd(1);
  qd << target;
  const Pose2 grasped_world =
      fx.object.forward_kinematics(qd, fx.root_world)
          .link_pose[fx.object.link_index(fx.grasped_link)];
  const Pose2 ee_world = grasped_world * fx.grasp.inverse();
  const Pose2 base_world = ee_world * Pose2{0.75, 0.0, 0.0}.inverse();
  Vec q = fx.consistent_q;
  q[0] = base_world.x;
  q[1] = base_world.y;
  q[2] = base_world.theta;
  q[3] = q[4] = q[5] = 0.0;
  q[q.size() - 1] = -target;
  return q;
}

/// Robot grasping a door handle.  The door frame sits at `frame_world`;
/// the arm is stretched (all zeros) and the base placed so the end effector
/// is `grasp` away from the handle.
inline AttachedFixture door_fixture(const Pose2& frame_world = {2.0, 1.0,
                                                               kPi / 2},
                                    Scalar hinge_value = 0.05) {
  const KinematicTree door = door_tree();
  const Pose2 grasp{0.25, 0.0, kPi / 2};  // ee frame -> handle frame

  Vec qd(1);
  qd << hinge_value;
  const Pose2 handle_world =
      door.forward_kinematics(qd, frame_world)
          .link_pose[door.link_index("handle")];
  const Pose2 ee_world = handle_world * grasp.inverse();
  // Straight arm: the ee frame is 0.75 ahead of the base center.
  const Pose2 base_world = ee_world * Pose2{0.75, 0.0, 0.0}.inverse();

  ObjectAttachment att;
  att.object_id = "door";
  att.model = door;
  att.spec = {"ee", "handle", grasp};
  att.root_pose = frame_world;
  att.anchored = true;
  att.config = {{"hinge", hinge_value}};

  AttachedFixture fx{Akr::construct(base_tree(), arm_tree(), "ee", att),
                     Vec(7),
                     frame_world,
                     hinge_value,
                     door,
                     "handle",
                     "hinge",
                     grasp};
  fx.consistent_q << base_world.x, base_world.y, base_world.theta, 0.0, 0.0,
      0.0, -hinge_value;
  return fx;
}

/// Robot grasping a drawer knob (drawer opens toward +x of the cabinet).
inline AttachedFixture drawer_fixture(const Pose2& cabinet_world = {3.0, 0.0,
                                                                    0.0},
                                      Scalar slide_value = 0.02) {
  const KinematicTree drawer = drawer_tree();
  const Pose2 grasp{0.25, 0.0, kPi};  // ee points at the knob, pulling along x

  Vec qd(1);
  qd << slide_value;
  const Pose2 knob_world = drawer.forward_kinematics(qd, cabinet_world)
                               .link_pose[drawer.link_index("knob")];
  const Pose2 ee_world = knob_world * grasp.inverse();
  const Pose2 base_world = ee_world * Pose2{0.75, 0.0, 0.0}.inverse();

  ObjectAttachment att;
  att.object_id = "drawer";
  att.model = drawer;
  att.spec = {"ee", "knob", grasp};
  att.root_pose = cabinet_world;
  att.anchored = true;
  att.config = {{"slide", slide_value}};

  AttachedFixture fx{Akr::construct(base_tree(), arm_tree(), "ee", att),
                     Vec(7),
                     cabinet_world,
                     slide_value,
                     drawer,
                     "knob",
                     "slide",
                     grasp};
  fx.consistent_q << base_world.x, base_world.y, base_world.theta, 0.0, 0.0,
      0.0, -slide_value;
  return fx;
}

}  // namespace akplan::testfx
