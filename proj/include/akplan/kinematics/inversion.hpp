// SPDX-License-Identifier: Apache-2.0
//
// Kinematics inversion: re-root a tree at one of its links so that the link
// a gripper holds becomes the root and the formerly fixed part (e.g. a door
// frame) becomes the chain's terminal.
//
// Along the old root -> new-root chain every joint is reversed: its motion
// sense is negated (the stored joint keeps its id; consumers negate the
// configuration value) and its limits become [-upper, -lower].  Because a
// joint's motion acts about the frame reached *after* its parent->child
// transform, a reversed joint cannot keep both its motion axis and the old
// link frames; the joint adjacent to the new root therefore carries the
// identity transform and every other reversed joint carries the inverse
// transform of its chain successor, which re-bases the moving frame onto the
// original joint axis.  This implementation materializes those re-based
// frames as explicit shapeless pivot links and restores every original link
// frame behind a fixed joint, so forward kinematics of the inverted tree
// reproduces the world pose of *every* original link exactly.  Side branches
// and off-chain subtrees carry over verbatim.
#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "akplan/common.hpp"
#include "akplan/kinematics/tree.hpp"

namespace akplan {

struct InvertedTree {
  KinematicTree tree;
  /// Ids of actuated joints whose motion sense was negated.  A configuration
  /// value q of the original tree corresponds to -q in the inverted tree for
  /// these joints (all others carry over unchanged).
  std::vector<std::string> reversed_joints;
};

/// Re-root `tree` at `new_root`.  Returns the tree unchanged when `new_root`
/// is already the root.  Throws kChain when the link does not exist.
inline InvertedTree invert_kinematics(const KinematicTree& tree,
                                      const std::string& new_root) {
  const std::size_t target = tree.link_index(new_root);
  (void)target;
  if (new_root == tree.root()) return {tree, {}};

  const Chain chain = find_chain(tree, tree.root(), new_root);
  const std::size_t m = chain.joints.size();  // chain joints J_1 .. J_m

  std::unordered_set<std::string> chain_joint_ids(chain.joints.begin(),
                                                  chain.joints.end());

  std::vector<Link> links;
  std::vector<Joint> joints;
  InvertedTree out;

  // Original links keep id, shape, and (after the fixed restores below)
  // their exact frames.
  for (const Link& l : tree.links()) links.push_back(l);

  // Pivot links: one per chain joint, holding the re-based moving frame.
  // Ids are uniquified so a tree that already contains pivot links (from an
  // earlier inversion) can be inverted again.
  std::unordered_set<std::string> used_link_ids;
  for (const Link& l : tree.links()) used_link_ids.insert(l.id);
  std::unordered_set<std::string> used_joint_ids;
  for (const Joint& j : tree.joints()) used_joint_ids.insert(j.id);
  const auto fresh_id = [](std::unordered_set<std::string>& used,
                           const std::string& base) {
    std::string id = base;
    int n = 2;
    while (used.count(id) > 0) id = base + std::to_string(n++);
    used.insert(id);
    return id;
  };
  std::unordered_map<std::string, std::string> pivot_of;
  for (const std::string& jid : chain.joints) {
    pivot_of[jid] = fresh_id(used_link_ids, jid + ":pivot");
    links.push_back(Link{pivot_of.at(jid), std::nullopt});
  }
  const auto pivot_id = [&pivot_of](const Joint& j) {
    return pivot_of.at(j.id);
  };

  // Reversed chain.  chain.links = [old_root = L_0, ..., L_m = new_root],
  // chain.joints = [J_1, ..., J_m] with J_a connecting L_{a-1} -> L_a.
  //
  //   new_root -> pivot(J_m)        transform I,            motion of J_m reversed
  //   pivot(J_{a+1}) -> pivot(J_a)  transform origin(J_{a+1})^-1, motion of J_a reversed
  //   pivot(J_a) -> L_{a-1}         transform origin(J_a)^-1, fixed frame restore
  for (std::size_t a = m; a >= 1; --a) {
    const Joint& orig = tree.joints()[tree.joint_index(chain.joints[a - 1])];
    Joint rev;
    rev.id = orig.id;
    rev.type = orig.type;
    rev.axis = orig.axis;
    if (orig.is_dof()) {
      rev.lower = -orig.upper;
      rev.upper = -orig.lower;
      out.reversed_joints.push_back(orig.id);
    }
    if (a == m) {
      rev.parent = new_root;
      rev.origin = Pose2::identity();
    } else {
      const Joint& succ = tree.joints()[tree.joint_index(chain.joints[a])];
      rev.parent = pivot_id(succ);
      rev.origin = succ.origin.inverse();
    }
    rev.child = pivot_id(orig);
    joints.push_back(rev);

    Joint restore;
    restore.id = fresh_id(used_joint_ids, orig.id + ":rebase");
    restore.type = JointType::kFixed;
    restore.parent = pivot_id(orig);
    restore.child = chain.links[a - 1];
    restore.origin = orig.origin.inverse();
    joints.push_back(restore);
  }

  // Everything that is not a chain joint carries over verbatim: side
  // branches of chain links and whole off-chain subtrees.
  for (const Joint& j : tree.joints()) {
    if (chain_joint_ids.count(j.id) == 0) joints.push_back(j);
  }

  out.tree = KinematicTree::make(new_root, std::move(links), std::move(joints));
  return out;
}

}  // namespace akplan
