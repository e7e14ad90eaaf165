// SPDX-License-Identifier: Apache-2.0
//
// World description for planning: static obstacles, articulated / rigid
// objects with their current state, and named regions used for start
// sampling and baseline parking.  Scenes are loaded from JSON documents
// (see docs/formats.md); every schema violation names the offending field.
#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "akplan/common.hpp"
#include "akplan/geometry/distance.hpp"
#include "akplan/geometry/occupancy_grid.hpp"
#include "akplan/geometry/shapes.hpp"
#include "akplan/io/json_util.hpp"
#include "akplan/kinematics/model_io.hpp"
#include "akplan/kinematics/tree.hpp"

namespace akplan {

/// Named convex area.  `heading` optionally fixes the base orientation
/// assigned to poses sampled from the region.
struct Region {
  std::string name;
  ConvexShape shape{ConvexShape::circle(1.0)};
  Pose2 pose;
  std::optional<Scalar> heading;
};

/// Uniform point inside the region: bounding-box rejection sampling.  A
/// degenerate region falls back to its center after `max_tries` misses.
inline Vec2 sample_in_region(const Region& region, Rng& rng,
                             int max_tries = 256) {
  const Scalar r = region.shape.bounding_radius();
  const Vec2 c = region.pose.translation();
  for (int t = 0; t < max_tries; ++t) {
    const Vec2 p{rng.uniform(c.x() - r, c.x() + r),
                 rng.uniform(c.y() - r, c.y() + r)};
    if (point_signed_distance(p, region.shape, region.pose) <= 0.0) return p;
  }
  return c;
}

inline bool region_contains(const Region& region, const Vec2& p) {
  return point_signed_distance(p, region.shape, region.pose) <= 0.0;
}

/// One articulated or rigid object placed in the world.  `config` holds the
/// current value of each actuated joint (absent entries read as zero);
/// `attach_link` and `grasp_offset` describe how the robot's gripper holds
/// the object when it is manipulated.
struct SceneObject {
  std::string id;
  KinematicTree model;
  Pose2 root_pose;
  bool anchored{true};
  std::array<bool, 3> anchor_mask{true, true, true};
  std::map<std::string, Scalar> config;
  std::string attach_link;
  Pose2 grasp_offset;

  /// Current joint values in the model's configuration order.
  [[nodiscard]] Vec config_vec() const {
    Vec q = Vec::Zero(static_cast<Eigen::Index>(model.dof_count()));
    const auto names = model.dof_ids();
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto it = config.find(names[i]);
      if (it != config.end()) q[static_cast<Eigen::Index>(i)] = it->second;
    }
    return q;
  }

  [[nodiscard]] FkResult fk() const {
    return model.forward_kinematics(config_vec(), root_pose);
  }

  /// World pose of one link at the current configuration.
  [[nodiscard]] Pose2 link_world(const std::string& link) const {
    return fk().link_pose[model.link_index(link)];
  }
};

struct Scene {
  std::string name;
  Bounds bounds{};
  Scalar grid_resolution{0.05};
  std::vector<PlacedShape> statics;
  std::vector<SceneObject> objects;
  std::vector<Region> regions;

  [[nodiscard]] bool has_object(const std::string& id) const {
    return std::any_of(objects.begin(), objects.end(),
                       [&](const SceneObject& o) { return o.id == id; });
  }

  [[nodiscard]] const SceneObject& object(const std::string& id) const {
    for (const SceneObject& o : objects) {
      if (o.id == id) return o;
    }
    fail(ErrorKind::kLookup, "scene has no object named '" + id + "'");
  }

  [[nodiscard]] SceneObject& object(const std::string& id) {
    for (SceneObject& o : objects) {
      if (o.id == id) return o;
    }
    fail(ErrorKind::kLookup, "scene has no object named '" + id + "'");
  }

  [[nodiscard]] bool has_region(const std::string& name_) const {
    return std::any_of(regions.begin(), regions.end(),
                       [&](const Region& r) { return r.name == name_; });
  }

  [[nodiscard]] const Region& region(const std::string& name_) const {
    for (const Region& r : regions) {
      if (r.name == name_) return r;
    }
    fail(ErrorKind::kLookup, "scene has no region named '" + name_ + "'");
  }
};

/// Collision bodies of the world as the robot sees them: static shapes plus
/// every shaped link of every object at its current configuration, except
/// objects named in `exclude` (typically the one the robot is holding, whose
/// links live inside the combined robot-object model instead).
inline std::vector<PlacedShape> scene_obstacles(
    const Scene& scene, const std::vector<std::string>& exclude = {}) {
  std::vector<PlacedShape> out = scene.statics;
  for (const SceneObject& obj : scene.objects) {
    if (std::find(exclude.begin(), exclude.end(), obj.id) != exclude.end()) {
      continue;
    }
    const FkResult f = obj.fk();
    const auto& links = obj.model.links();
    for (std::size_t i = 0; i < links.size(); ++i) {
      if (!links[i].shape) continue;
      out.push_back(PlacedShape{*links[i].shape, f.link_pose[i]});
    }
  }
  return out;
}

/// Shaped links of one object at an arbitrary root pose / configuration,
/// e.g. to stamp a tentative placement into a feasibility map.
inline std::vector<PlacedShape> object_bodies_at(const SceneObject& obj,
                                                 const Pose2& root_pose,
                                                 const Vec& config) {
  std::vector<PlacedShape> out;
  const FkResult f = obj.model.forward_kinematics(config, root_pose);
  const auto& links = obj.model.links();
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (!links[i].shape) continue;
    out.push_back(PlacedShape{*links[i].shape, f.link_pose[i]});
  }
  return out;
}

namespace detail {

inline std::string dirname_of(const std::string& path) {
  const auto pos = path.find_last_of('/');
  if (pos == std::string::npos) return ".";
  return path.substr(0, pos);
}

inline std::string join_path(const std::string& dir, const std::string& rel) {
  if (!rel.empty() && rel.front() == '/') return rel;  // already absolute
  return dir + "/" + rel;
}

inline std::array<bool, 3> parse_mask(const Json& obj, const std::string& path,
                                      const std::string& key,
                                      std::array<bool, 3> fallback) {
  if (!obj.is_object() || obj.find(key) == obj.end()) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3) {
    fail_schema(path + "." + key, "expected an array of 3 booleans");
  }
  std::array<bool, 3> mask{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_boolean()) {
      fail_schema(path + "." + key + "[" + std::to_string(i) + "]",
                  "expected a boolean");
    }
    mask[i] = v[i].get<bool>();
  }
  return mask;
}

}  // namespace detail

/// Parse a scene document.  `base_dir` resolves relative model references.
inline Scene parse_scene(const Json& doc, const std::string& base_dir,
                         const std::string& path = "scene") {
  Scene scene;
  scene.name = get_string_or(doc, path, "name", "");

  const auto b = get_numbers(get_field(doc, path, "bounds"), path + ".bounds", 4);
  scene.bounds = Bounds{b[0], b[1], b[2], b[3]};
  if (scene.bounds.width() <= 0.0 || scene.bounds.height() <= 0.0) {
    fail_schema(path + ".bounds", "bounds must have positive area");
  }
  scene.grid_resolution = get_number_or(doc, path, "grid_resolution", 0.05);
  if (scene.grid_resolution <= 0.0) {
    fail_schema(path + ".grid_resolution", "resolution must be positive");
  }

  if (doc.is_object() && doc.find("statics") != doc.end()) {
    const Json& arr = get_array(doc, path, "statics");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string spath = path + ".statics[" + std::to_string(i) + "]";
      PlacedShape ps{parse_shape(get_field(arr[i], spath, "shape"),
                                 spath + ".shape"),
                     get_pose_or(arr[i], spath, "pose", Pose2::identity())};
      scene.statics.push_back(std::move(ps));
    }
  }

  if (doc.is_object() && doc.find("objects") != doc.end()) {
    const Json& arr = get_array(doc, path, "objects");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string opath = path + ".objects[" + std::to_string(i) + "]";
      SceneObject obj;
      obj.id = get_string(arr[i], opath, "id");
      if (scene.has_object(obj.id)) {
        fail_schema(opath + ".id", "duplicate object id '" + obj.id + "'");
      }
      const Json& model = get_field(arr[i], opath, "model");
      if (model.is_string()) {
        const std::string file =
            detail::join_path(base_dir, model.get<std::string>());
        obj.model = parse_model(load_json_file(file), file).tree;
      } else {
        obj.model = parse_model(model, opath + ".model").tree;
      }
      obj.root_pose = get_pose(arr[i], opath, "pose");
      obj.anchored = get_bool_or(arr[i], opath, "anchored", true);
      obj.anchor_mask = detail::parse_mask(arr[i], opath, "anchor_mask",
                                           {true, true, true});
      if (arr[i].is_object() && arr[i].find("config") != arr[i].end()) {
        const Json& cfg = arr[i].at("config");
        if (!cfg.is_object()) {
          fail_schema(opath + ".config", "expected an object of joint values");
        }
        for (auto it = cfg.begin(); it != cfg.end(); ++it) {
          if (!it.value().is_number()) {
            fail_schema(opath + ".config." + it.key(), "expected a number");
          }
          if (!obj.model.has_joint(it.key())) {
            fail_schema(opath + ".config." + it.key(),
                        "model has no joint with this id");
          }
          obj.config[it.key()] = it.value().get<Scalar>();
        }
      }
      obj.attach_link = get_string_or(arr[i], opath, "attach_link", "");
      if (!obj.attach_link.empty() && !obj.model.has_link(obj.attach_link)) {
        fail_schema(opath + ".attach_link",
                    "model has no link named '" + obj.attach_link + "'");
      }
      obj.grasp_offset =
          get_pose_or(arr[i], opath, "grasp_offset", Pose2::identity());
      scene.objects.push_back(std::move(obj));
    }
  }

  if (doc.is_object() && doc.find("regions") != doc.end()) {
    const Json& arr = get_array(doc, path, "regions");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string rpath = path + ".regions[" + std::to_string(i) + "]";
      Region region;
      region.name = get_string(arr[i], rpath, "name");
      if (scene.has_region(region.name)) {
        fail_schema(rpath + ".name",
                    "duplicate region name '" + region.name + "'");
      }
      region.shape =
          parse_shape(get_field(arr[i], rpath, "shape"), rpath + ".shape");
      region.pose = get_pose_or(arr[i], rpath, "pose", Pose2::identity());
      if (arr[i].is_object() && arr[i].find("heading") != arr[i].end()) {
        region.heading = get_number(arr[i], rpath, "heading");
      }
      scene.regions.push_back(std::move(region));
    }
  }

  return scene;
}

inline Scene load_scene(const std::string& file) {
  return parse_scene(load_json_file(file), detail::dirname_of(file), file);
}

}  // namespace akplan
