// SPDX-License-Identifier: Apache-2.0
//
// Planar kinematic trees.
//
// A tree is a set of links (rigid bodies with optional convex geometry)
// connected by joints.  Each joint stores a constant parent->child transform
// (`origin`) plus a motion constraint applied in the frame reached after the
// origin:
//
//   child_frame = parent_frame * origin * motion(q)
//
// where motion(q) is a rotation about the frame origin for revolute joints
// and a translation of q along `axis` for prismatic joints.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "akplan/common.hpp"
#include "akplan/geometry/pose2.hpp"
#include "akplan/geometry/shapes.hpp"

namespace akplan {

enum class JointType { kFixed, kRevolute, kPrismatic };

struct Link {
  std::string id;
  std::optional<ConvexShape> shape;  // collision geometry in the link frame
};

struct Joint {
  std::string id;
  std::string parent;
  std::string child;
  JointType type{JointType::kFixed};
  Pose2 origin;          // parent frame -> joint frame at zero motion
  Vec2 axis{1.0, 0.0};   // prismatic translation direction (joint frame)
  Scalar lower{0};       // position limits; unused for fixed joints
  Scalar upper{0};

  [[nodiscard]] bool is_dof() const noexcept { return type != JointType::kFixed; }

  /// Motion transform at joint value q.
  [[nodiscard]] Pose2 motion(Scalar q) const {
    switch (type) {
      case JointType::kFixed:
        return Pose2::identity();
      case JointType::kRevolute:
        return {0.0, 0.0, q};
      case JointType::kPrismatic:
        return {q * axis.x(), q * axis.y(), 0.0};
    }
    return Pose2::identity();
  }
};

/// Poses produced by one forward-kinematics pass.
struct FkResult {
  std::vector<Pose2> link_pose;    // indexed by link index
  std::vector<Pose2> joint_frame;  // parent * origin, indexed by joint index
};

/// Path between two links through the (undirected) tree.
struct Chain {
  std::vector<std::string> links;   // endpoints inclusive
  std::vector<std::string> joints;  // one fewer than links
};

class KinematicTree {
 public:
  /// Validating constructor.  `root` must name one of `links`; every other
  /// link must be reachable from it through exactly one parent joint.
  static KinematicTree make(std::string root, std::vector<Link> links,
                            std::vector<Joint> joints) {
    KinematicTree t;
    t.root_ = std::move(root);
    t.links_ = std::move(links);
    t.joints_ = std::move(joints);
    t.build_and_validate();
    return t;
  }

  [[nodiscard]] const std::string& root() const noexcept { return root_; }
  [[nodiscard]] const std::vector<Link>& links() const noexcept { return links_; }
  [[nodiscard]] const std::vector<Joint>& joints() const noexcept { return joints_; }

  [[nodiscard]] bool has_link(const std::string& id) const {
    return link_index_.count(id) > 0;
  }

  [[nodiscard]] bool has_joint(const std::string& id) const {
    return joint_index_.count(id) > 0;
  }

  [[nodiscard]] std::size_t link_index(const std::string& id) const {
    const auto it = link_index_.find(id);
    require(it != link_index_.end(), ErrorKind::kChain, "unknown link: " + id);
    return it->second;
  }

  [[nodiscard]] std::size_t joint_index(const std::string& id) const {
    const auto it = joint_index_.find(id);
    require(it != joint_index_.end(), ErrorKind::kChain, "unknown joint: " + id);
    return it->second;
  }

  /// Index of the joint whose child is `link`, or -1 for the root.
  [[nodiscard]] int parent_joint_of(std::size_t link_idx) const {
    return parent_joint_[link_idx];
  }

  /// Number of actuated (non-fixed) joints.
  [[nodiscard]] std::size_t dof_count() const noexcept { return dof_joints_.size(); }

  /// Actuated joint indices in depth-first order from the root.  This order
  /// defines the configuration vector layout.
  [[nodiscard]] const std::vector<std::size_t>& dof_joints() const noexcept {
    return dof_joints_;
  }

  [[nodiscard]] std::vector<std::string> dof_ids() const {
    std::vector<std::string> ids;
    ids.reserve(dof_joints_.size());
    for (auto j : dof_joints_) ids.push_back(joints_[j].id);
    return ids;
  }

  /// Lower/upper limit vectors in configuration order.
  [[nodiscard]] Vec lower_limits() const {
    Vec lo(dof_joints_.size());
    for (std::size_t i = 0; i < dof_joints_.size(); ++i) {
      lo[static_cast<Eigen::Index>(i)] = joints_[dof_joints_[i]].lower;
    }
    return lo;
  }
  [[nodiscard]] Vec upper_limits() const {
    Vec hi(dof_joints_.size());
    for (std::size_t i = 0; i < dof_joints_.size(); ++i) {
      hi[static_cast<Eigen::Index>(i)] = joints_[dof_joints_[i]].upper;
    }
    return hi;
  }

  /// Forward kinematics at configuration `q` (one value per actuated joint,
  /// in dof order) with the root link held at `root_pose`.
  [[nodiscard]] FkResult forward_kinematics(const Vec& q,
                                            const Pose2& root_pose = {}) const {
    require(static_cast<std::size_t>(q.size()) == dof_joints_.size(),
            ErrorKind::kDimension,
            "configuration size does not match dof count");
    FkResult out;
    out.link_pose.resize(links_.size());
    out.joint_frame.resize(joints_.size());
    out.link_pose[root_index_] = root_pose;
    // topo_links_ is ordered parent-before-child.
    for (std::size_t k = 1; k < topo_links_.size(); ++k) {
      const std::size_t li = topo_links_[k];
      const Joint& j = joints_[parent_joint_[li]];
      const Pose2& parent_pose = out.link_pose[link_index_.at(j.parent)];
      const Pose2 frame = parent_pose * j.origin;
      out.joint_frame[parent_joint_[li]] = frame;
      const Scalar value =
          j.is_dof() ? q[static_cast<Eigen::Index>(dof_position_[parent_joint_[li]])]
                     : 0.0;
      out.link_pose[li] = frame * j.motion(value);
    }
    return out;
  }

  /// Position of an actuated joint's value within the configuration vector.
  [[nodiscard]] std::size_t dof_position(const std::string& joint_id) const {
    const std::size_t ji = joint_index(joint_id);
    require(joints_[ji].is_dof(), ErrorKind::kConfig,
            "joint has no configuration variable: " + joint_id);
    return dof_position_[ji];
  }

  /// Joint indices whose parent is the given link, in declaration order.
  [[nodiscard]] const std::vector<std::size_t>& child_joints(
      std::size_t link_idx) const {
    return children_[link_idx];
  }

 private:
  void build_and_validate() {
    require(!links_.empty(), ErrorKind::kChain, "tree has no links");
    for (std::size_t i = 0; i < links_.size(); ++i) {
      const auto [it, inserted] = link_index_.emplace(links_[i].id, i);
      (void)it;
      require(inserted, ErrorKind::kChain, "duplicate link id: " + links_[i].id);
    }
    require(link_index_.count(root_) > 0, ErrorKind::kChain,
            "root link not found: " + root_);
    root_index_ = link_index_.at(root_);

    parent_joint_.assign(links_.size(), -1);
    children_.assign(links_.size(), {});
    for (std::size_t i = 0; i < joints_.size(); ++i) {
      Joint& j = joints_[i];
      const auto [it, inserted] = joint_index_.emplace(j.id, i);
      (void)it;
      require(inserted, ErrorKind::kChain, "duplicate joint id: " + j.id);
      require(link_index_.count(j.parent) > 0, ErrorKind::kChain,
              "joint " + j.id + " references unknown parent link " + j.parent);
      require(link_index_.count(j.child) > 0, ErrorKind::kChain,
              "joint " + j.id + " references unknown child link " + j.child);
      const std::size_t child_idx = link_index_.at(j.child);
      require(parent_joint_[child_idx] == -1, ErrorKind::kChain,
              "link " + j.child + " has more than one parent joint");
      require(child_idx != root_index_, ErrorKind::kChain,
              "root link cannot be a joint child");
      if (j.is_dof()) {
        require(j.lower <= j.upper, ErrorKind::kConfig,
                "joint " + j.id + " has inverted limits");
      }
      if (j.type == JointType::kPrismatic) {
        const Scalar n = j.axis.norm();
        require(n > 1e-12, ErrorKind::kConfig,
                "joint " + j.id + " has a degenerate prismatic axis");
        j.axis /= n;
      }
      parent_joint_[child_idx] = static_cast<int>(i);
      children_[link_index_.at(j.parent)].push_back(i);
    }

    // Depth-first order; also detects disconnected links (cycles are already
    // impossible given unique parents and an un-parented root).
    topo_links_.clear();
    topo_links_.reserve(links_.size());
    std::vector<std::size_t> stack{root_index_};
    std::vector<char> seen(links_.size(), 0);
    while (!stack.empty()) {
      const std::size_t li = stack.back();
      stack.pop_back();
      if (seen[li]) continue;
      seen[li] = 1;
      topo_links_.push_back(li);
      const auto& kids = children_[li];
      // Push in reverse so declaration order is visited first.
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
        stack.push_back(link_index_.at(joints_[*it].child));
      }
    }
    require(topo_links_.size() == links_.size(), ErrorKind::kChain,
            "tree has disconnected links");

    dof_joints_.clear();
    dof_position_.assign(joints_.size(), 0);
    for (std::size_t k = 1; k < topo_links_.size(); ++k) {
      const std::size_t ji = static_cast<std::size_t>(parent_joint_[topo_links_[k]]);
      if (joints_[ji].is_dof()) {
        dof_position_[ji] = dof_joints_.size();
        dof_joints_.push_back(ji);
      }
    }
  }

  std::string root_;
  std::vector<Link> links_;
  std::vector<Joint> joints_;
  std::unordered_map<std::string, std::size_t> link_index_;
  std::unordered_map<std::string, std::size_t> joint_index_;
  std::size_t root_index_{0};
  std::vector<int> parent_joint_;                 // per link; -1 for root
  std::vector<std::vector<std::size_t>> children_;  // joint indices per link
  std::vector<std::size_t> topo_links_;           // parent-before-child
  std::vector<std::size_t> dof_joints_;           // actuated joints, dof order
  std::vector<std::size_t> dof_position_;         // joint index -> dof slot
};

/// Path between two links.  Throws kChain when either endpoint is missing.
inline Chain find_chain(const KinematicTree& tree, const std::string& from,
                        const std::string& to) {
  const auto ancestry = [&](const std::string& id) {
    std::vector<std::size_t> path;  // link indices from `id` up to the root
    std::size_t li = tree.link_index(id);
    path.push_back(li);
    while (tree.parent_joint_of(li) != -1) {
      const Joint& j = tree.joints()[tree.parent_joint_of(li)];
      li = tree.link_index(j.parent);
      path.push_back(li);
    }
    return path;
  };
  const std::vector<std::size_t> up_a = ancestry(from);
  const std::vector<std::size_t> up_b = ancestry(to);
  // Find the lowest common ancestor by trimming the shared tail.
  std::size_t ia = up_a.size(), ib = up_b.size();
  while (ia > 0 && ib > 0 && up_a[ia - 1] == up_b[ib - 1]) {
    --ia;
    --ib;
  }
  // After trimming, up_a[ia] == up_b[ib] is the lowest common ancestor.
  Chain chain;
  for (std::size_t i = 0; i <= ia; ++i) {
    chain.links.push_back(tree.links()[up_a[i]].id);
  }
  for (std::size_t i = ib; i-- > 0;) {
    chain.links.push_back(tree.links()[up_b[i]].id);
  }
  for (std::size_t i = 0; i + 1 < chain.links.size(); ++i) {
    const std::size_t a = tree.link_index(chain.links[i]);
    const std::size_t b = tree.link_index(chain.links[i + 1]);
    const int ja = tree.parent_joint_of(a);
    const int jb = tree.parent_joint_of(b);
    if (jb != -1 && tree.link_index(tree.joints()[jb].parent) == a) {
      chain.joints.push_back(tree.joints()[jb].id);
    } else {
      require(ja != -1 && tree.link_index(tree.joints()[ja].parent) == b,
              ErrorKind::kInvariant, "chain construction failed");
      chain.joints.push_back(tree.joints()[ja].id);
    }
  }
  return chain;
}

}  // namespace akplan
