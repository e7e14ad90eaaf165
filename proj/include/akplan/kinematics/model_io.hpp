// SPDX-License-Identifier: Apache-2.0
//
// Kinematic model documents.  One document describes one robot or object
// tree; the field layout is specified in docs/formats.md.
//
//   {
//     "name": "door",
//     "root": "frame",
//     "links": [
//       {"id": "frame", "shape": {"type": "box", "size": [0.1, 0.1]}},
//       {"id": "panel"}
//     ],
//     "joints": [
//       {"id": "hinge", "parent": "frame", "child": "panel",
//        "type": "revolute", "origin": [0, 0, 0], "limits": [0, 1.9]}
//     ]
//   }
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "akplan/io/json_util.hpp"
#include "akplan/kinematics/tree.hpp"

namespace akplan {

struct NamedModel {
  std::string name;
  KinematicTree tree;
};

inline JointType parse_joint_type(const std::string& s, const std::string& path) {
  if (s == "fixed") return JointType::kFixed;
  if (s == "revolute") return JointType::kRevolute;
  if (s == "prismatic") return JointType::kPrismatic;
  fail_schema(path, "unknown joint type '" + s + "'");
}

inline const char* joint_type_name(JointType t) {
  switch (t) {
    case JointType::kFixed:
      return "fixed";
    case JointType::kRevolute:
      return "revolute";
    case JointType::kPrismatic:
      return "prismatic";
  }
  return "fixed";
}

inline NamedModel parse_model(const Json& doc, const std::string& path = "model") {
  NamedModel model;
  model.name = get_string_or(doc, path, "name", "");
  const std::string root = get_string(doc, path, "root");

  std::vector<Link> links;
  const Json& jlinks = get_array(doc, path, "links", 1);
  for (std::size_t i = 0; i < jlinks.size(); ++i) {
    const std::string lpath = path + ".links[" + std::to_string(i) + "]";
    Link link;
    link.id = get_string(jlinks[i], lpath, "id");
    if (jlinks[i].is_object() && jlinks[i].find("shape") != jlinks[i].end()) {
      link.shape = parse_shape(jlinks[i].at("shape"), lpath + ".shape");
    }
    links.push_back(std::move(link));
  }

  std::vector<Joint> joints;
  if (doc.is_object() && doc.find("joints") != doc.end()) {
    const Json& jjoints = get_array(doc, path, "joints");
    for (std::size_t i = 0; i < jjoints.size(); ++i) {
      const std::string jpath = path + ".joints[" + std::to_string(i) + "]";
      Joint joint;
      joint.id = get_string(jjoints[i], jpath, "id");
      joint.parent = get_string(jjoints[i], jpath, "parent");
      joint.child = get_string(jjoints[i], jpath, "child");
      joint.type = parse_joint_type(get_string(jjoints[i], jpath, "type"),
                                    jpath + ".type");
      joint.origin = get_pose_or(jjoints[i], jpath, "origin", Pose2::identity());
      if (joint.type == JointType::kPrismatic) {
        const auto a = get_numbers(get_field(jjoints[i], jpath, "axis"),
                                   jpath + ".axis", 2);
        joint.axis = {a[0], a[1]};
      }
      if (joint.is_dof()) {
        const auto lim = get_numbers(get_field(jjoints[i], jpath, "limits"),
                                     jpath + ".limits", 2);
        joint.lower = lim[0];
        joint.upper = lim[1];
      }
      joints.push_back(std::move(joint));
    }
  }

  try {
    model.tree = KinematicTree::make(root, std::move(links), std::move(joints));
  } catch (const Error& e) {
    fail_schema(path, e.what());
  }
  return model;
}

inline NamedModel load_model(const std::string& file) {
  return parse_model(load_json_file(file), file);
}

inline Json model_to_json(const NamedModel& model) {
  Json doc;
  if (!model.name.empty()) doc["name"] = model.name;
  doc["root"] = model.tree.root();
  Json jlinks = Json::array();
  for (const Link& l : model.tree.links()) {
    Json jl;
    jl["id"] = l.id;
    if (l.shape) jl["shape"] = shape_to_json(*l.shape);
    jlinks.push_back(std::move(jl));
  }
  doc["links"] = std::move(jlinks);
  Json jjoints = Json::array();
  for (const Joint& j : model.tree.joints()) {
    Json jj;
    jj["id"] = j.id;
    jj["parent"] = j.parent;
    jj["child"] = j.child;
    jj["type"] = joint_type_name(j.type);
    jj["origin"] = pose_to_json(j.origin);
    if (j.type == JointType::kPrismatic) {
      jj["axis"] = Json::array({j.axis.x(), j.axis.y()});
    }
    if (j.is_dof()) jj["limits"] = Json::array({j.lower, j.upper});
    jjoints.push_back(std::move(jj));
  }
  doc["joints"] = std::move(jjoints);
  return doc;
}

inline void save_model(const std::string& file, const NamedModel& model) {
  save_json_file(file, model_to_json(model));
}

}  // namespace akplan
