// SPDX-License-Identifier: Apache-2.0
//
// Helpers for reading structured-text documents with field-path diagnostics:
// every schema violation names the offending field as "path.to[2].field".
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "akplan/common.hpp"
#include "akplan/geometry/pose2.hpp"
#include "akplan/geometry/shapes.hpp"

namespace akplan {

using Json = nlohmann::json;

[[noreturn]] inline void fail_schema(const std::string& path,
                                     const std::string& what) {
  fail(ErrorKind::kSchema, path + ": " + what);
}

inline Json load_json_file(const std::string& file) {
  std::ifstream in(file);
  require(in.good(), ErrorKind::kIo, "cannot open file: " + file);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::kSchema, file + ": " + e.what());
  }
  return doc;
}

inline void save_json_file(const std::string& file, const Json& doc) {
  std::ofstream out(file);
  require(out.good(), ErrorKind::kIo, "cannot write file: " + file);
  out << doc.dump(2) << "\n";
}

inline const Json& get_field(const Json& obj, const std::string& path,
                             const std::string& key) {
  if (!obj.is_object()) fail_schema(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail_schema(path + "." + key, "missing required field");
  return *it;
}

inline Scalar get_number(const Json& obj, const std::string& path,
                         const std::string& key) {
  const Json& v = get_field(obj, path, key);
  if (!v.is_number()) fail_schema(path + "." + key, "expected a number");
  return v.get<Scalar>();
}

inline Scalar get_number_or(const Json& obj, const std::string& path,
                            const std::string& key, Scalar fallback) {
  if (!obj.is_object() || obj.find(key) == obj.end()) return fallback;
  return get_number(obj, path, key);
}

inline std::string get_string(const Json& obj, const std::string& path,
                              const std::string& key) {
  const Json& v = get_field(obj, path, key);
  if (!v.is_string()) fail_schema(path + "." + key, "expected a string");
  return v.get<std::string>();
}

inline std::string get_string_or(const Json& obj, const std::string& path,
                                 const std::string& key,
                                 const std::string& fallback) {
  if (!obj.is_object() || obj.find(key) == obj.end()) return fallback;
  return get_string(obj, path, key);
}

inline bool get_bool_or(const Json& obj, const std::string& path,
                        const std::string& key, bool fallback) {
  if (!obj.is_object() || obj.find(key) == obj.end()) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_boolean()) fail_schema(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

inline const Json& get_array(const Json& obj, const std::string& path,
                             const std::string& key, std::size_t min_size = 0) {
  const Json& v = get_field(obj, path, key);
  if (!v.is_array()) fail_schema(path + "." + key, "expected an array");
  if (v.size() < min_size) {
    fail_schema(path + "." + key, "expected at least " +
                                      std::to_string(min_size) + " entries");
  }
  return v;
}

inline std::vector<Scalar> get_numbers(const Json& arr, const std::string& path,
                                       std::size_t expected) {
  if (!arr.is_array() || arr.size() != expected) {
    fail_schema(path, "expected an array of " + std::to_string(expected) +
                          " numbers");
  }
  std::vector<Scalar> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      fail_schema(path + "[" + std::to_string(i) + "]", "expected a number");
    }
    out.push_back(arr[i].get<Scalar>());
  }
  return out;
}

/// Pose encoded as [x, y, theta].
inline Pose2 get_pose(const Json& obj, const std::string& path,
                      const std::string& key) {
  const auto v = get_numbers(get_field(obj, path, key), path + "." + key, 3);
  return {v[0], v[1], v[2]};
}

inline Pose2 get_pose_or(const Json& obj, const std::string& path,
                         const std::string& key, const Pose2& fallback) {
  if (!obj.is_object() || obj.find(key) == obj.end()) return fallback;
  return get_pose(obj, path, key);
}

inline Json pose_to_json(const Pose2& p) { return Json::array({p.x, p.y, p.theta}); }

/// Shape document: {"type": "circle", "radius": r} |
/// {"type": "box", "size": [sx, sy]} |
/// {"type": "polygon", "vertices": [[x, y], ...]} (counter-clockwise).
inline ConvexShape parse_shape(const Json& obj, const std::string& path) {
  const std::string type = get_string(obj, path, "type");
  try {
    if (type == "circle") {
      return ConvexShape::circle(get_number(obj, path, "radius"));
    }
    if (type == "box") {
      const auto s = get_numbers(get_field(obj, path, "size"), path + ".size", 2);
      return ConvexShape::box(s[0], s[1]);
    }
    if (type == "polygon") {
      const Json& verts = get_array(obj, path, "vertices", 3);
      std::vector<Vec2> pts;
      for (std::size_t i = 0; i < verts.size(); ++i) {
        const auto v = get_numbers(verts[i],
                                   path + ".vertices[" + std::to_string(i) + "]", 2);
        pts.emplace_back(v[0], v[1]);
      }
      return ConvexShape::polygon(pts);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kSchema) throw;
    fail_schema(path, e.what());
  }
  fail_schema(path + ".type", "unknown shape type '" + type + "'");
}

inline Json shape_to_json(const ConvexShape& shape) {
  Json out;
  if (shape.kind() == ConvexShape::Kind::kCircle) {
    out["type"] = "circle";
    out["radius"] = shape.radius();
  } else {
    out["type"] = "polygon";
    Json verts = Json::array();
    for (const Vec2& v : shape.vertices()) {
      verts.push_back(Json::array({v.x(), v.y()}));
    }
    out["vertices"] = std::move(verts);
  }
  return out;
}

}  // namespace akplan
