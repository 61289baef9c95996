// Copyright 2026 The tcpalign Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tcpalign/config.hpp"

#include <fstream>
#include <string>

#include "tcpalign/error.hpp"

namespace tcpalign {
namespace {

template <typename T>
T get_as(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, "config field '" + key + "': " + e.what());
  }
}

[[noreturn]] void unknown_key(const std::string& section, const std::string& key) {
  throw Error(ErrorCode::kParseError, "unknown config field '" + section + "." + key + "'");
}

void require_object(const Json& j, const std::string& section) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kParseError, "config section '" + section + "' must be an object");
  }
}

}  // namespace

Json to_json(const AugmentConfig& cfg) {
  Json j;
  j["enabled"] = cfg.enabled;
  j["overlay_alpha"] = cfg.overlay_alpha;
  j["overlay_probability"] = cfg.overlay_probability;
  j["overlay_pool"] = cfg.overlay_pool;
  j["perspective_scale"] = cfg.perspective_scale;
  j["perspective_probability"] = cfg.perspective_probability;
  return j;
}

Json to_json(const AlignmentConfig& cfg) {
  Json j;
  j["kappa"] = cfg.kappa;
  j["output_size"] = cfg.output_size;
  j["overlay_enabled"] = cfg.overlay_enabled;
  j["overlay_axis_length"] = cfg.overlay.axis_length;
  j["overlay_line_width"] = cfg.overlay.line_width;
  j["gripper_open_ref"] = cfg.gripper_open_ref;
  j["gripper_close_ref"] = cfg.gripper_close_ref;
  j["seed"] = cfg.seed;
  return j;
}

void merge_json(const Json& j, AugmentConfig& cfg) {
  require_object(j, "augment");
  for (const auto& [key, v] : j.items()) {
    if (key == "enabled") cfg.enabled = get_as<bool>(v, key);
    else if (key == "overlay_alpha") cfg.overlay_alpha = get_as<double>(v, key);
    else if (key == "overlay_probability") cfg.overlay_probability = get_as<double>(v, key);
    else if (key == "overlay_pool") cfg.overlay_pool = get_as<std::string>(v, key);
    else if (key == "perspective_scale") cfg.perspective_scale = get_as<double>(v, key);
    else if (key == "perspective_probability") cfg.perspective_probability = get_as<double>(v, key);
    else unknown_key("augment", key);
  }
}

void merge_json(const Json& j, AlignmentConfig& cfg) {
  require_object(j, "alignment");
  for (const auto& [key, v] : j.items()) {
    if (key == "kappa") cfg.kappa = get_as<int>(v, key);
    else if (key == "output_size") cfg.output_size = get_as<int>(v, key);
    else if (key == "overlay_enabled") cfg.overlay_enabled = get_as<bool>(v, key);
    else if (key == "overlay_axis_length") cfg.overlay.axis_length = get_as<double>(v, key);
    else if (key == "overlay_line_width") cfg.overlay.line_width = get_as<int>(v, key);
    else if (key == "gripper_open_ref") cfg.gripper_open_ref = get_as<double>(v, key);
    else if (key == "gripper_close_ref") cfg.gripper_close_ref = get_as<double>(v, key);
    else if (key == "seed") cfg.seed = get_as<std::uint64_t>(v, key);
    else unknown_key("alignment", key);
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace tcpalign
