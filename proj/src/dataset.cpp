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

#include "tcpalign/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tcpalign/config.hpp"
#include "tcpalign/error.hpp"

namespace tcpalign {
namespace fs = std::filesystem;

namespace {

// Where a JSON value came from, for error messages.
struct Origin {
  std::string file;
  std::size_t line = 0;  // 0 for whole-document sources

  std::string at(const std::string& field) const {
    std::ostringstream os;
    os << file;
    if (line > 0) os << ':' << line;
    os << ": field '" << field << "'";
    return os.str();
  }
};

[[noreturn]] void parse_fail(const Origin& o, const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kParseError, o.at(field) + ": " + why);
}

const Json& field(const Json& obj, const std::string& key, const Origin& o) {
  if (!obj.is_object()) parse_fail(o, key, "enclosing value is not an object");
  const auto it = obj.find(key);
  if (it == obj.end()) parse_fail(o, key, "missing");
  return *it;
}

double number(const Json& obj, const std::string& key, const Origin& o) {
  const Json& v = field(obj, key, o);
  if (!v.is_number()) parse_fail(o, key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) parse_fail(o, key, "not finite");
  return d;
}

std::string text(const Json& obj, const std::string& key, const Origin& o) {
  const Json& v = field(obj, key, o);
  if (!v.is_string()) parse_fail(o, key, "expected a string");
  return v.get<std::string>();
}

template <std::size_t N>
std::array<double, N> numbers(const Json& obj, const std::string& key, const Origin& o) {
  const Json& v = field(obj, key, o);
  if (!v.is_array() || v.size() != N) {
    parse_fail(o, key, "expected an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) parse_fail(o, key, "expected an array of numbers");
    out[i] = v[i].get<double>();
    if (!std::isfinite(out[i])) parse_fail(o, key, "not finite");
  }
  return out;
}

Rot3 rotation_from_file(const std::array<double, 9>& v) {
  Mat3 m;
  m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  return Rot3::nearest(m, kFileRotationTolerance);
}

bool valid_id(const std::string& id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

CameraCalib parse_camera(const std::string& id, const Json& j, const Origin& parent) {
  const Origin o{parent.file + " (cameras." + id + ")", 0};
  CameraCalib c;
  c.width = static_cast<int>(number(j, "width", o));
  c.height = static_cast<int>(number(j, "height", o));
  c.intrinsics.fx = number(j, "fx", o);
  c.intrinsics.fy = number(j, "fy", o);
  c.intrinsics.cx = number(j, "cx", o);
  c.intrinsics.cy = number(j, "cy", o);
  const auto r = numbers<9>(j, "rotation", o);
  const auto t = numbers<3>(j, "translation", o);
  try {
    c.pose = Pose{rotation_from_file(r), Vec3(t[0], t[1], t[2]), Frame::kWorld, Frame::kCamera};
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidCalibration, "camera '" + id + "': " + e.what());
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidCalibration, "camera '" + id + "': " + e.what());
  }
  return c;
}

FrameRecord parse_frame(const Json& j, const Origin& o) {
  FrameRecord f;
  const Json& idx = field(j, "index", o);
  if (!idx.is_number_unsigned() && !(idx.is_number_integer() && idx.get<std::int64_t>() >= 0)) {
    parse_fail(o, "index", "expected a non-negative integer");
  }
  f.index = idx.get<std::uint64_t>();
  f.image_path = text(j, "image", o);
  const auto r = numbers<9>(j, "rotation", o);
  const auto t = numbers<3>(j, "translation", o);
  try {
    f.ee_pose = Pose{rotation_from_file(r), Vec3(t[0], t[1], t[2]), Frame::kWorld, Frame::kTool};
  } catch (const Error& e) {
    parse_fail(o, "rotation", e.what());
  }
  f.gripper_width = number(j, "gripper_width", o);
  f.action = numbers<10>(j, "action", o);
  return f;
}

std::vector<FrameRecord> load_trajectory(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParseError, path.string() + ": cannot open trajectory file");
  }
  std::vector<FrameRecord> frames;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Origin o{path.string(), lineno};
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParseError, o.at("<line>") + ": " + e.what());
    }
    frames.push_back(parse_frame(j, o));
  }
  return frames;
}

}  // namespace

std::size_t DatasetManifest::frame_count() const {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.frames.size();
  return n;
}

void validate_manifest(const DatasetManifest& ds) {
  if (ds.gripper_open_ref == ds.gripper_close_ref) {
    throw Error(ErrorCode::kParseError, "gripper_open_ref equals gripper_close_ref");
  }
  for (const auto& [id, cam] : ds.cameras) {
    try {
      cam.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidCalibration, "camera '" + id + "': " + e.what());
    }
  }
  for (const auto& t : ds.trajectories) {
    if (!valid_id(t.id)) {
      throw Error(ErrorCode::kParseError, "trajectory id '" + t.id + "' must match [A-Za-z0-9_-]+");
    }
    if (!ds.cameras.contains(t.camera_id)) {
      throw Error(ErrorCode::kMissingCamera,
                  "trajectory '" + t.id + "' references unknown camera '" + t.camera_id + "'");
    }
    if (t.frames.empty()) {
      throw Error(ErrorCode::kParseError, "trajectory '" + t.id + "' has no frames");
    }
    for (std::size_t i = 1; i < t.frames.size(); ++i) {
      if (t.frames[i].index <= t.frames[i - 1].index) {
        throw Error(ErrorCode::kParseError, "trajectory '" + t.id +
                                                "': frame indices must be strictly increasing");
      }
    }
  }
}

DatasetManifest load_manifest(const fs::path& manifest_path) {
  const Json j = read_json_file(manifest_path);
  const Origin o{manifest_path.string(), 0};
  DatasetManifest ds;
  ds.root = manifest_path.parent_path();
  ds.robot = text(j, "robot", o);
  ds.gripper_open_ref = number(j, "gripper_open_ref", o);
  ds.gripper_close_ref = number(j, "gripper_close_ref", o);
  ds.z_table = number(j, "z_table", o);

  const Json& cams = field(j, "cameras", o);
  if (!cams.is_object()) parse_fail(o, "cameras", "expected an object");
  for (const auto& [id, cj] : cams.items()) ds.cameras.emplace(id, parse_camera(id, cj, o));

  const Json& trajs = field(j, "trajectories", o);
  if (!trajs.is_array()) parse_fail(o, "trajectories", "expected an array");
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const Origin to{o.file + " (trajectories[" + std::to_string(i) + "])", 0};
    TrajectoryManifest t;
    t.id = text(trajs[i], "id", to);
    t.camera_id = text(trajs[i], "camera", to);
    if (!valid_id(t.id)) parse_fail(to, "id", "must match [A-Za-z0-9_-]+");
    if (!ds.cameras.contains(t.camera_id)) {
      throw Error(ErrorCode::kMissingCamera,
                  "trajectory '" + t.id + "' references unknown camera '" + t.camera_id + "'");
    }
    t.frames = load_trajectory(ds.root / ("traj_" + t.id + ".jsonl"));
    ds.trajectories.push_back(std::move(t));
  }
  validate_manifest(ds);
  return ds;
}

std::string format_scalar(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  std::string s(buf, res.ptr);
  return s == "-0" ? "0" : s;
}

std::string proprio_csv_header() {
  std::string h = "frame,r1,r2,r3,r4,r5,r6,z,g";
  for (int i = 1; i <= 10; ++i) h += ",a" + std::to_string(i);
  return h;
}

namespace {

struct FrameOutput {
  bool ok = false;
  bool clamped = false;
  std::string row;
  std::string error;
  StageTiming timing;
};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

FrameOutput process_frame(const DatasetManifest& ds, const TrajectoryManifest& traj,
                          const FrameRecord& frame, const AlignmentConfig& cfg,
                          std::span<const ImageBuf> pool, const fs::path& image_dir) {
  FrameOutput out;
  try {
    const CameraCalib& calib = ds.cameras.at(traj.camera_id);
    auto t0 = std::chrono::steady_clock::now();
    const ImageBuf img = read_png(ds.root / frame.image_path);
    if (img.width() != calib.width || img.height() != calib.height) {
      throw Error(ErrorCode::kDimensionMismatch, "image size differs from camera calibration");
    }
    out.timing.load_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    const CalibrationJitter jitter = frame.jitter.value_or(CalibrationJitter{});
    CropResult crop = crop_and_overlay(img, calib, frame.ee_pose, cfg, jitter);
    const ImageBuf augmented =
        augment_frame(crop.image, cfg.augment, pool, cfg.seed, traj.id, frame.index);
    const ImageBuf aligned = resize_bilinear(augmented, cfg.output_size, cfg.output_size);
    const ProprioAligned proprio = apply_proprio_jitter(
        align_proprio(frame.ee_pose, frame.gripper_width, calib, cfg), jitter);
    out.timing.align_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    write_png(image_dir / (std::to_string(frame.index) + ".png"), aligned);
    out.timing.write_ms = ms_since(t0);

    std::string row = std::to_string(frame.index);
    for (double v : proprio.values()) row += "," + format_scalar(v);
    for (double v : frame.action) row += "," + format_scalar(v);
    out.row = std::move(row);
    out.clamped = crop.clamped;
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

PreprocessReport preprocess_dataset(const DatasetManifest& ds, const AlignmentConfig& cfg_in,
                                    const fs::path& out_dir, int workers) {
  AlignmentConfig cfg = cfg_in;
  // The dataset's own gripper references describe its hardware.
  cfg.gripper_open_ref = ds.gripper_open_ref;
  cfg.gripper_close_ref = ds.gripper_close_ref;
  cfg.validate();

  PreprocessReport report;
  if (ds.trajectories.empty()) return report;

  std::vector<ImageBuf> pool;
  if (cfg.augment.enabled) pool = load_overlay_pool(cfg.augment.overlay_pool);

  const fs::path aligned_dir = out_dir / "aligned";
  struct Job {
    std::size_t traj;
    std::size_t frame;
  };
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < ds.trajectories.size(); ++t) {
    fs::create_directories(aligned_dir / "images" / ds.trajectories[t].id);
    for (std::size_t f = 0; f < ds.trajectories[t].frames.size(); ++f) jobs.push_back({t, f});
  }

  std::vector<FrameOutput> results(jobs.size());
  const int n = static_cast<int>(jobs.size());
#ifdef _OPENMP
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (int i = 0; i < n; ++i) {
    const auto& traj = ds.trajectories[jobs[i].traj];
    results[i] = process_frame(ds, traj, traj.frames[jobs[i].frame], cfg, pool,
                               aligned_dir / "images" / traj.id);
  }
  (void)workers;

  // Deterministic merge in trajectory / frame order.
  std::size_t i = 0;
  for (const auto& traj : ds.trajectories) {
    std::ofstream csv(aligned_dir / ("proprio_" + traj.id + ".csv"), std::ios::binary);
    if (!csv) throw Error(ErrorCode::kIo, "cannot write proprio CSV for trajectory " + traj.id);
    csv << proprio_csv_header() << '\n';
    for (const auto& frame : traj.frames) {
      const FrameOutput& r = results[i++];
      ++report.frames_total;
      report.timing.load_ms += r.timing.load_ms;
      report.timing.align_ms += r.timing.align_ms;
      report.timing.write_ms += r.timing.write_ms;
      if (!r.ok) {
        report.errors.push_back({traj.id, frame.index, r.error});
        continue;
      }
      ++report.frames_written;
      if (r.clamped) ++report.clamped_frames;
      csv << r.row << '\n';
    }
  }
  return report;
}

DatasetManifest jitter_calibration(const DatasetManifest& ds, double pixel_jitter,
                                   double proprio_noise, FrameRng& rng) {
  if (!(pixel_jitter >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pixel_jitter must be >= 0");
  }
  DatasetManifest out = ds;
  for (auto& traj : out.trajectories) {
    for (auto& frame : traj.frames) {
      frame.jitter = sample_calibration_jitter(rng, pixel_jitter, proprio_noise);
    }
  }
  return out;
}

}  // namespace tcpalign
