// SPDX-License-Identifier: Apache-2.0
//
// Augmented kinematic representation (AKR): one kinematic tree combining a
// virtual mobile base, the manipulator, and (optionally) a grasped object
// whose kinematics have been inverted about the grasped link.  Planning then
// happens in the tree's joint space (the A-Space): q = [q_base, q_arm,
// q_object].
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "akplan/common.hpp"
#include "akplan/geometry/pose2.hpp"
#include "akplan/geometry/shapes.hpp"
#include "akplan/kinematics/inversion.hpp"
#include "akplan/kinematics/tree.hpp"

namespace akplan {

/// Travel limits of the virtual base joints.
struct VirtualBaseLimits {
  Scalar x_min{-10.0}, x_max{10.0};
  Scalar y_min{-10.0}, y_max{10.0};
  // Wider than one turn so interpolation across the +-pi seam stays in range.
  Scalar theta_min{-2.0 * kPi}, theta_max{2.0 * kPi};
};

/// Virtual mobile base: two perpendicular prismatic joints (world x, then y)
/// followed by one revolute joint at the base's rotation center.  With the
/// default rotation center, q_base = (x, y, theta) is exactly the footprint
/// link's world pose.
inline KinematicTree make_virtual_base(const ConvexShape& footprint,
                                       const Pose2& rotation_center = {},
                                       const VirtualBaseLimits& limits = {}) {
  std::vector<Link> links{{"world", std::nullopt},
                          {"base_x", std::nullopt},
                          {"base_y", std::nullopt},
                          {"base", footprint}};
  std::vector<Joint> joints(3);
  joints[0] = {"base_x", "world", "base_x", JointType::kPrismatic,
               Pose2::identity(), {1.0, 0.0}, limits.x_min, limits.x_max};
  joints[1] = {"base_y", "base_x", "base_y", JointType::kPrismatic,
               Pose2::identity(), {0.0, 1.0}, limits.y_min, limits.y_max};
  joints[2] = {"base_theta", "base_y", "base", JointType::kRevolute,
               rotation_center, {1.0, 0.0}, limits.theta_min, limits.theta_max};
  return KinematicTree::make("world", std::move(links), std::move(joints));
}

/// How a grasped object hangs off the manipulator.
struct AttachmentSpec {
  std::string ee_link;      // robot link the object is rigidly held by
  std::string object_link;  // link of the object model that is grasped
  Pose2 grasp_offset;       // ee frame -> grasped link frame
};

/// Object model plus its world state at attachment time.
struct ObjectAttachment {
  std::string object_id;
  KinematicTree model;  // object tree in its own root frame
  AttachmentSpec spec;
  /// World pose of the model root.  For articulated fixtures (door, drawer)
  /// this is the anchor the chain-closure residual pins; free objects leave
  /// `anchored` false and the residual empty (or a masked subset).
  Pose2 root_pose;
  bool anchored{false};
  std::array<bool, 3> anchor_mask{true, true, true};  // x, y, theta
  /// Object joint values (by joint id) at attachment time; joints that do
  /// not become part of the chain are frozen at these values.
  std::map<std::string, Scalar> config;
};

/// Contiguous slice of the configuration vector.
struct DofRange {
  int begin{0};
  int end{0};

  [[nodiscard]] int size() const noexcept { return end - begin; }
};

struct DofLayout {
  DofRange base;
  DofRange arm;
  DofRange object;

  [[nodiscard]] int size() const noexcept { return object.end; }
};

/// One placed collision body of the AKR at some configuration.
struct AkrBody {
  std::size_t link{0};  // link index within the AKR tree
  Pose2 pose;
};

class Akr {
 public:
  /// Assemble the combined tree.  The arm's root link is grafted onto the
  /// base footprint link; a grasped object (already holding its attachment
  /// state) is inverted about the grasped link and grafted onto the
  /// end-effector link.
  static Akr construct(const KinematicTree& base, const KinematicTree& arm,
                       const std::string& ee_link,
                       std::optional<ObjectAttachment> object = std::nullopt) {
    Akr akr;
    std::vector<Link> links;
    std::vector<Joint> joints;
    for (const Link& l : base.links()) links.push_back(l);
    for (const Joint& j : base.joints()) joints.push_back(j);

    // Base tree convention: the deepest link carries the footprint.
    const std::string mount = base.links().back().id;
    akr.base_link_ = mount;
    joints.push_back(Joint{"arm_mount", mount, arm.root(), JointType::kFixed,
                           Pose2::identity(), {1.0, 0.0}, 0.0, 0.0});
    for (const Link& l : arm.links()) links.push_back(l);
    for (const Joint& j : arm.joints()) joints.push_back(j);
    require(arm.has_link(ee_link), ErrorKind::kChain,
            "end-effector link not found in arm: " + ee_link);
    akr.ee_link_ = ee_link;

    std::vector<std::string> object_chain_dofs;
    if (object) {
      require(object->model.has_link(object->spec.object_link), ErrorKind::kChain,
              "grasped link not found in object: " + object->spec.object_link);
      InvertedTree inv =
          invert_kinematics(object->model, object->spec.object_link);
      joints.push_back(Joint{"attachment", ee_link, inv.tree.root(),
                             JointType::kFixed, object->spec.grasp_offset,
                             {1.0, 0.0}, 0.0, 0.0});
      for (const Link& l : inv.tree.links()) links.push_back(l);
      for (const Joint& j : inv.tree.joints()) joints.push_back(j);
      object_chain_dofs = inv.reversed_joints;

      akr.attachment_ = *object;
      akr.terminal_link_ = object->model.root();
      if (object->anchored) {
        akr.anchor_ = object->root_pose;
        akr.anchor_mask_ = object->anchor_mask;
      }
      // Joint values for the inverted tree: reversed chain joints negate the
      // stored object configuration; side-branch joints keep it.
      for (const std::string& jid : inv.reversed_joints) {
        akr.reversed_object_joints_.insert(jid);
      }
    }

    akr.tree_ = KinematicTree::make(base.root(), std::move(links),
                                    std::move(joints));

    // Active dofs: base (3) + arm + inverted object chain.  Side-branch
    // object joints stay frozen at their attachment-time values so the
    // collision geometry remains faithful.
    const std::vector<std::string> base_dofs = base.dof_ids();
    require(base_dofs.size() == 3, ErrorKind::kInvariant,
            "virtual base must contribute exactly 3 dofs");
    std::vector<std::string> active;
    active.insert(active.end(), base_dofs.begin(), base_dofs.end());
    const std::vector<std::string> arm_dofs = arm.dof_ids();
    active.insert(active.end(), arm_dofs.begin(), arm_dofs.end());
    active.insert(active.end(), object_chain_dofs.begin(),
                  object_chain_dofs.end());
    akr.layout_.base = {0, 3};
    akr.layout_.arm = {3, 3 + static_cast<int>(arm_dofs.size())};
    akr.layout_.object = {akr.layout_.arm.end,
                          akr.layout_.arm.end +
                              static_cast<int>(object_chain_dofs.size())};
    akr.finalize(active);
    return akr;
  }

  [[nodiscard]] const KinematicTree& tree() const noexcept { return tree_; }
  [[nodiscard]] const DofLayout& layout() const noexcept { return layout_; }
  [[nodiscard]] int dof_count() const noexcept { return layout_.size(); }
  [[nodiscard]] const std::vector<std::string>& dof_names() const noexcept {
    return active_names_;
  }
  [[nodiscard]] const std::string& ee_link() const noexcept { return ee_link_; }
  [[nodiscard]] const std::string& base_link() const noexcept {
    return base_link_;
  }
  [[nodiscard]] const std::string& terminal_link() const noexcept {
    return terminal_link_;
  }
  [[nodiscard]] const std::optional<Pose2>& anchor() const noexcept {
    return anchor_;
  }
  [[nodiscard]] const std::optional<ObjectAttachment>& attachment()
      const noexcept {
    return attachment_;
  }

  [[nodiscard]] const Vec& lower_limits() const noexcept { return lower_; }
  [[nodiscard]] const Vec& upper_limits() const noexcept { return upper_; }

  /// Dimension of the chain-closure residual (0 when nothing is anchored).
  [[nodiscard]] int chain_dim() const noexcept { return chain_dim_; }

  /// Expand an active configuration to the full tree configuration.
  [[nodiscard]] Vec full_config(const Vec& q) const {
    check_dim(q);
    Vec full = frozen_full_;
    for (std::size_t i = 0; i < active_slots_.size(); ++i) {
      full[active_slots_[i]] = q[static_cast<Eigen::Index>(i)];
    }
    return full;
  }

  [[nodiscard]] FkResult fk(const Vec& q) const {
    return tree_.forward_kinematics(full_config(q));
  }

  [[nodiscard]] Pose2 link_pose(const Vec& q, const std::string& link) const {
    return fk(q).link_pose[tree_.link_index(link)];
  }

  /// Chain-closure residual: masked components of (anchor - fk(terminal)),
  /// with the angular difference wrapped.  Empty when no anchor is set.
  [[nodiscard]] Vec chain_residual(const Vec& q) const {
    if (!anchor_) return Vec(0);
    return residual_from_fk(fk(q));
  }

  [[nodiscard]] Vec chain_residual_from_fk(const FkResult& fk_result) const {
    if (!anchor_) return Vec(0);
    return residual_from_fk(fk_result);
  }

  /// Analytic Jacobian of the chain residual w.r.t. the active configuration.
  [[nodiscard]] Mat chain_jacobian(const Vec& q) const {
    if (!anchor_) return Mat(0, dof_count());
    const FkResult f = fk(q);
    const Mat jp = pose_jacobian_from_fk(f, tree_.link_index(terminal_link_));
    Mat out(chain_dim_, dof_count());
    int r = 0;
    for (int c = 0; c < 3; ++c) {
      if (anchor_mask_[static_cast<std::size_t>(c)]) {
        out.row(r++) = -jp.row(c);  // residual = anchor - fk
      }
    }
    return out;
  }

  /// Analytic Jacobian of a link's world pose (x, y, theta) w.r.t. the
  /// active configuration.
  [[nodiscard]] Mat link_pose_jacobian(const Vec& q, const std::string& link) const {
    const FkResult f = fk(q);
    return pose_jacobian_from_fk(f, tree_.link_index(link));
  }

  [[nodiscard]] Mat pose_jacobian_from_fk(const FkResult& f,
                                          std::size_t link_idx) const {
    Mat jac = Mat::Zero(3, dof_count());
    const Pose2& target = f.link_pose[link_idx];
    // Walk from the link up to the root, accumulating one column per active
    // joint on the path.
    std::size_t li = link_idx;
    while (tree_.parent_joint_of(li) != -1) {
      const std::size_t ji = static_cast<std::size_t>(tree_.parent_joint_of(li));
      const Joint& j = tree_.joints()[ji];
      const int slot = active_slot_of_joint_[ji];
      if (slot >= 0) {
        const Pose2& frame = f.joint_frame[ji];
        if (j.type == JointType::kRevolute) {
          const Vec2 r = target.translation() - frame.translation();
          jac(0, slot) = -r.y();
          jac(1, slot) = r.x();
          jac(2, slot) = 1.0;
        } else if (j.type == JointType::kPrismatic) {
          const Vec2 dir = frame.rotate(j.axis);
          jac(0, slot) = dir.x();
          jac(1, slot) = dir.y();
        }
      }
      li = tree_.link_index(j.parent);
    }
    return jac;
  }

  /// Placed collision bodies at configuration q (links with geometry only).
  [[nodiscard]] std::vector<AkrBody> bodies(const Vec& q) const {
    return bodies_from_fk(fk(q));
  }

  [[nodiscard]] std::vector<AkrBody> bodies_from_fk(const FkResult& f) const {
    std::vector<AkrBody> out;
    out.reserve(shaped_links_.size());
    for (const std::size_t li : shaped_links_) {
      out.push_back({li, f.link_pose[li]});
    }
    return out;
  }

  /// Link-index pairs subject to the self-collision constraint: links that
  /// belong to different rigid groups (fixed-joint-connected clusters) whose
  /// groups are not directly connected by a joint.
  [[nodiscard]] const std::vector<std::pair<std::size_t, std::size_t>>&
  self_pairs() const noexcept {
    return self_pairs_;
  }

  /// Shape of a link (must be one of the shaped links).
  [[nodiscard]] const ConvexShape& link_shape(std::size_t link_idx) const {
    const auto& s = tree_.links()[link_idx].shape;
    require(s.has_value(), ErrorKind::kInvariant, "link has no shape");
    return *s;
  }

  /// Object joint values (original model convention) encoded in an active
  /// configuration: reversed chain joints negate back.
  [[nodiscard]] std::map<std::string, Scalar> object_config(const Vec& q) const {
    check_dim(q);
    std::map<std::string, Scalar> out;
    if (!attachment_) return out;
    for (int i = layout_.object.begin; i < layout_.object.end; ++i) {
      out[active_names_[static_cast<std::size_t>(i)]] = -q[i];
    }
    // Frozen side-branch joints keep their attachment-time values.
    for (const auto& [jid, value] : attachment_->config) {
      if (out.count(jid) == 0) out[jid] = value;
    }
    return out;
  }

  /// Active object-segment values for a given object configuration map
  /// (missing joints default to 0).
  [[nodiscard]] Vec object_segment(const std::map<std::string, Scalar>& config) const {
    Vec seg(layout_.object.size());
    for (int i = 0; i < layout_.object.size(); ++i) {
      const auto& name =
          active_names_[static_cast<std::size_t>(layout_.object.begin + i)];
      const auto it = config.find(name);
      seg[i] = it == config.end() ? 0.0 : -it->second;
    }
    return seg;
  }

 private:
  void finalize(const std::vector<std::string>& active) {
    active_names_ = active;
    active_slots_.clear();
    active_slot_of_joint_.assign(tree_.joints().size(), -1);

    // Frozen values for every tree dof; active slots overwrite at fk time.
    frozen_full_ = Vec::Zero(static_cast<Eigen::Index>(tree_.dof_count()));
    if (attachment_) {
      for (const auto& [jid, value] : attachment_->config) {
        if (!has_dof(jid)) continue;
        const Scalar sign = reversed_object_joints_.count(jid) ? -1.0 : 1.0;
        frozen_full_[static_cast<Eigen::Index>(tree_.dof_position(jid))] =
            sign * value;
      }
    }

    lower_ = Vec(static_cast<Eigen::Index>(active.size()));
    upper_ = Vec(static_cast<Eigen::Index>(active.size()));
    for (std::size_t i = 0; i < active.size(); ++i) {
      const std::size_t ji = tree_.joint_index(active[i]);
      require(tree_.joints()[ji].is_dof(), ErrorKind::kInvariant,
              "active joint is fixed: " + active[i]);
      active_slots_.push_back(
          static_cast<Eigen::Index>(tree_.dof_position(active[i])));
      active_slot_of_joint_[ji] = static_cast<int>(i);
      lower_[static_cast<Eigen::Index>(i)] = tree_.joints()[ji].lower;
      upper_[static_cast<Eigen::Index>(i)] = tree_.joints()[ji].upper;
    }

    chain_dim_ = 0;
    if (anchor_) {
      for (const bool b : anchor_mask_) chain_dim_ += b ? 1 : 0;
    }

    for (std::size_t li = 0; li < tree_.links().size(); ++li) {
      if (tree_.links()[li].shape) shaped_links_.push_back(li);
    }
    build_self_pairs();
  }

  [[nodiscard]] bool has_dof(const std::string& joint_id) const {
    for (const std::size_t ji : tree_.dof_joints()) {
      if (tree_.joints()[ji].id == joint_id) return true;
    }
    return false;
  }

  void build_self_pairs() {
    // Rigid groups: union over fixed joints.
    const std::size_t n = tree_.links().size();
    std::vector<std::size_t> group(n);
    for (std::size_t i = 0; i < n; ++i) group[i] = i;
    const auto find = [&](std::size_t x) {
      while (group[x] != x) {
        group[x] = group[group[x]];
        x = group[x];
      }
      return x;
    };
    for (const Joint& j : tree_.joints()) {
      if (j.type == JointType::kFixed) {
        group[find(tree_.link_index(j.parent))] = find(tree_.link_index(j.child));
      }
    }
    // Groups directly connected by an actuated joint are "adjacent" and
    // skipped: touching at a shared axis is geometrically expected.
    std::vector<std::pair<std::size_t, std::size_t>> adjacent;
    for (const Joint& j : tree_.joints()) {
      if (j.type != JointType::kFixed) {
        adjacent.emplace_back(find(tree_.link_index(j.parent)),
                              find(tree_.link_index(j.child)));
      }
    }
    const auto is_adjacent = [&](std::size_t a, std::size_t b) {
      for (const auto& [x, y] : adjacent) {
        if ((x == a && y == b) || (x == b && y == a)) return true;
      }
      return false;
    };
    self_pairs_.clear();
    for (std::size_t i = 0; i < shaped_links_.size(); ++i) {
      for (std::size_t k = i + 1; k < shaped_links_.size(); ++k) {
        const std::size_t a = shaped_links_[i], b = shaped_links_[k];
        const std::size_t ga = find(a), gb = find(b);
        if (ga == gb || is_adjacent(ga, gb)) continue;
        self_pairs_.emplace_back(a, b);
      }
    }
  }

  [[nodiscard]] Vec residual_from_fk(const FkResult& f) const {
    const Pose2& terminal = f.link_pose[tree_.link_index(terminal_link_)];
    const Vec3 delta = pose_delta(*anchor_, terminal);
    Vec r(chain_dim_);
    int k = 0;
    for (int c = 0; c < 3; ++c) {
      if (anchor_mask_[static_cast<std::size_t>(c)]) r[k++] = delta[c];
    }
    return r;
  }

  void check_dim(const Vec& q) const {
    require(q.size() == static_cast<Eigen::Index>(active_names_.size()),
            ErrorKind::kDimension, "configuration size does not match AKR dofs");
  }

  KinematicTree tree_;
  DofLayout layout_;
  std::vector<std::string> active_names_;
  std::vector<Eigen::Index> active_slots_;   // active slot -> tree dof slot
  std::vector<int> active_slot_of_joint_;    // joint index -> active slot or -1
  Vec frozen_full_;                          // tree-dof vector of frozen values
  Vec lower_, upper_;
  std::string ee_link_;
  std::string base_link_;
  std::string terminal_link_;
  std::optional<Pose2> anchor_;
  std::array<bool, 3> anchor_mask_{true, true, true};
  int chain_dim_{0};
  std::optional<ObjectAttachment> attachment_;
  std::set<std::string> reversed_object_joints_;
  std::vector<std::size_t> shaped_links_;
  std::vector<std::pair<std::size_t, std::size_t>> self_pairs_;
};

}  // namespace akplan
