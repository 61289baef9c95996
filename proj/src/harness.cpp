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

#include "tcpalign/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tcpalign/dataset.hpp"
#include "tcpalign/error.hpp"
#include "tcpalign/parallel.hpp"

namespace tcpalign::harness {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr Rgb kTargetColor = {230, 190, 40};
constexpr Rgb kDistractorColors[] = {
    {60, 140, 220}, {80, 180, 90}, {200, 70, 160}, {150, 100, 60}};

struct Splat {
  double depth;
  Pixel center;
  double radius_px;
  Rgb color;
};

void fill_disc(ImageBuf& img, const Splat& s) {
  const double r2 = s.radius_px * s.radius_px;
  const int x_lo = std::max(0, static_cast<int>(std::ceil(s.center.u - s.radius_px)));
  const int x_hi = std::min(img.width() - 1, static_cast<int>(std::floor(s.center.u + s.radius_px)));
  const int y_lo = std::max(0, static_cast<int>(std::ceil(s.center.v - s.radius_px)));
  const int y_hi = std::min(img.height() - 1, static_cast<int>(std::floor(s.center.v + s.radius_px)));
  for (int y = y_lo; y <= y_hi; ++y) {
    const double dy = y - s.center.v;
    for (int x = x_lo; x <= x_hi; ++x) {
      const double dx = x - s.center.u;
      if (dx * dx + dy * dy <= r2) img.set(x, y, s.color);
    }
  }
}

Splat make_splat(const CameraCalib& calib, const Vec3& p_world, double radius, Rgb color,
                 const char* what) {
  const Vec3 pc = to_camera(calib, p_world);
  if (!(pc.z() > kMinDepth)) {
    throw Error(ErrorCode::kNonPositiveDepth, std::string(what) + " behind the camera");
  }
  const auto& k = calib.intrinsics;
  return Splat{pc.z(),
               Pixel{k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy},
               k.fx * radius / pc.z(), color};
}

Rot3 random_rotation(FrameRng& rng) {
  const Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  return Rot3::from_quaternion(q);
}

ImageBuf resize_to(const ImageBuf& img, int side) { return resize_bilinear(img, side, side); }

std::vector<float> gray_feature(const ImageBuf& img, int side) {
  return to_grayscale(resize_to(img, side));
}

bool uses_camera_actions(FeatureKind k) {
  return k != FeatureKind::kRaw && k != FeatureKind::kRawHighRes;
}

std::vector<float> features_from_image(const HarnessConfig& cfg, FeatureKind kind,
                                       const ImageBuf& img, const SceneState& s,
                                       double gripper_width, const CalibrationJitter& jitter) {
  const AlignmentConfig& ac = cfg.align;
  const auto w = static_cast<float>(cfg.proprio_weight);
  const int g = binarize_gripper(gripper_width, ac.gripper_open_ref, ac.gripper_close_ref);
  std::vector<float> f;
  const auto append_proprio_world = [&] {
    const Vec3& t = s.ee_pose.translation;
    f.push_back(w * static_cast<float>(t.x()));
    f.push_back(w * static_cast<float>(t.y()));
    f.push_back(w * static_cast<float>(t.z()));
    for (double v : rot_to_6d(s.ee_pose.rotation).v) f.push_back(w * static_cast<float>(v));
    f.push_back(w * static_cast<float>(g));
  };
  const auto height_only = [&](double z) { f.push_back(w * static_cast<float>(z)); };

  switch (kind) {
    case FeatureKind::kRaw:
      f = gray_feature(resize_to(img, ac.output_size), cfg.feature_size);
      append_proprio_world();
      break;
    case FeatureKind::kRawHighRes: {
      const int side = static_cast<int>(
          std::lround(static_cast<double>(cfg.feature_size) * cfg.image_size / ac.kappa));
      f = gray_feature(img, side);
      append_proprio_world();
      break;
    }
    case FeatureKind::kAligned: {
      f = gray_feature(align_visual(img, s.calib, s.ee_pose, ac, jitter).image, cfg.feature_size);
      const ProprioAligned p =
          apply_proprio_jitter(align_proprio(s.ee_pose, gripper_width, s.calib, ac), jitter);
      for (double v : p.values()) f.push_back(w * static_cast<float>(v));
      break;
    }
    case FeatureKind::kAlignedZOnly:
      f = gray_feature(align_visual(img, s.calib, s.ee_pose, ac, jitter).image, cfg.feature_size);
      height_only(s.ee_pose.translation.z() + jitter.proprio[6]);
      break;
    case FeatureKind::kObjectCentric: {
      const Pixel c = project_point(s.calib, s.scene.spheres.front().center);
      const CropResult crop = center_crop(img, c, CropSpec{ac.kappa});
      f = gray_feature(resize_to(crop.image, ac.output_size), cfg.feature_size);
      height_only(s.ee_pose.translation.z() + jitter.proprio[6]);
      break;
    }
  }
  return f;
}

// --- retrieval core --------------------------------------------------------

struct RetrievalOptions {
  std::vector<FeatureKind> kinds;
  std::vector<std::string> families;
  double pixel_jitter = 0.0;
  double proprio_noise = 0.0;
  int style_override = -1;
};

struct RetrievalResult {
  // mean_error[kind][family], meters
  std::vector<std::vector<double>> mean_error;
  std::size_t database_size = 0;
};

struct DemoSample {
  std::vector<std::vector<float>> features;  // per kind
  Vec3 action_world;
  Vec3 action_camera;
};

CalibrationJitter jitter_for(std::uint64_t seed, const std::string& stream, std::uint64_t idx,
                             const RetrievalOptions& opt) {
  if (opt.pixel_jitter == 0.0 && opt.proprio_noise == 0.0) return {};
  FrameRng rng = derive_rng(seed, stream, idx, "calibration-jitter");
  return sample_calibration_jitter(rng, opt.pixel_jitter, opt.proprio_noise);
}

RetrievalResult run_retrieval(const HarnessConfig& cfg, int n_demos, int n_eval,
                              std::uint64_t seed, const RetrievalOptions& opt) {
  cfg.validate();
  if (n_demos < 10) throw Error(ErrorCode::kInvalidArgument, "retrieval needs >= 10 demos");
  if (n_eval < 1) throw Error(ErrorCode::kInvalidArgument, "retrieval needs >= 1 query");
  const std::size_t n_kinds = opt.kinds.size();

  // Demonstrations.
  std::vector<std::vector<DemoSample>> per_demo(n_demos);
  parallel_for(n_demos, cfg.workers, [&](int d) {
    FrameRng rng = derive_rng(seed, "demo", d, "scene");
    SceneState s = sample_scene(cfg, rng);
    if (opt.style_override >= 0) s.scene.marker_style = opt.style_override;
    const std::vector<DemoFrame> frames = scripted_demo(s);
    const std::string jitter_stream = "demo-" + std::to_string(d);
    for (std::size_t k = 0; k < frames.size(); ++k) {
      SceneState at = s;
      at.ee_pose = frames[k].ee_pose;
      const ImageBuf img = render_scene(at);
      const CalibrationJitter jitter = jitter_for(seed, jitter_stream, k, opt);
      DemoSample sample;
      for (FeatureKind kind : opt.kinds) {
        sample.features.push_back(
            features_from_image(cfg, kind, img, at, frames[k].gripper_width, jitter));
      }
      sample.action_world = frames[k].action;
      sample.action_camera = at.calib.pose.rotation.transpose() * frames[k].action;
      per_demo[d].push_back(std::move(sample));
    }
  });

  std::vector<std::vector<std::vector<float>>> database(n_kinds);
  std::vector<Vec3> actions_world, actions_camera;
  for (auto& demo : per_demo) {
    for (auto& sample : demo) {
      for (std::size_t k = 0; k < n_kinds; ++k) database[k].push_back(std::move(sample.features[k]));
      actions_world.push_back(sample.action_world);
      actions_camera.push_back(sample.action_camera);
    }
  }
  per_demo.clear();

  // Queries: the base scene depends on the query index only, so families are
  // compared on paired samples.
  const std::size_t n_fam = opt.families.size();
  std::vector<double> errors(n_kinds * n_fam * n_eval, 0.0);
  parallel_for(static_cast<int>(n_fam) * n_eval, cfg.workers, [&](int job) {
    const int fam = job / n_eval;
    const int q = job % n_eval;
    FrameRng rng = derive_rng(seed, "query", q, "scene");
    SceneState s = sample_scene(cfg, rng);
    if (opt.style_override >= 0) s.scene.marker_style = opt.style_override;
    const std::vector<DemoFrame> frames = scripted_demo(s);
    const DemoFrame& truth = frames[rng.uniform_int(frames.size())];
    s.ee_pose = truth.ee_pose;

    const std::string& family = opt.families[fam];
    FrameRng shift_rng = derive_rng(seed, "query-" + family, q, "shift");
    ShiftSpec shift = sample_shift(cfg, family, shift_rng);
    if (opt.style_override >= 0) shift.style = -1;
    const SceneState shifted = apply_shift(s, shift);
    const ImageBuf img = render_scene(shifted);
    const CalibrationJitter jitter = jitter_for(seed, "query-" + family, q, opt);
    for (std::size_t k = 0; k < n_kinds; ++k) {
      const std::vector<float> f =
          features_from_image(cfg, opt.kinds[k], img, shifted, truth.gripper_width, jitter);
      const std::size_t nn = nearest_neighbor(database[k], f);
      const Vec3 predicted = uses_camera_actions(opt.kinds[k])
                                 ? Vec3(shifted.calib.pose.rotation * actions_camera[nn])
                                 : actions_world[nn];
      errors[(k * n_fam + fam) * n_eval + q] = (predicted - truth.action).norm();
    }
  });

  RetrievalResult out;
  out.database_size = actions_world.size();
  out.mean_error.assign(n_kinds, std::vector<double>(n_fam, 0.0));
  for (std::size_t k = 0; k < n_kinds; ++k) {
    for (std::size_t f = 0; f < n_fam; ++f) {
      double sum = 0.0;
      for (int q = 0; q < n_eval; ++q) sum += errors[(k * n_fam + f) * n_eval + q];
      out.mean_error[k][f] = sum / n_eval;
    }
  }
  return out;
}

const std::vector<std::string> kOodFamilies = {"workspace", "viewpoint", "embodiment"};

std::vector<std::string> retrieval_families() {
  std::vector<std::string> f = {"in_domain"};
  f.insert(f.end(), kOodFamilies.begin(), kOodFamilies.end());
  return f;
}

double mean_ood(const std::vector<double>& per_family) {
  // per_family[0] is in_domain.
  double s = 0.0;
  for (std::size_t i = 1; i < per_family.size(); ++i) s += per_family[i];
  return s / static_cast<double>(per_family.size() - 1);
}

double elapsed_ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// --- scene model -------------------------------------------------------------

void SceneSpec::validate() const {
  if (spheres.empty()) throw Error(ErrorCode::kInvalidArgument, "scene needs >= 1 sphere");
  for (const auto& s : spheres) {
    if (!(s.radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sphere radius must be > 0");
  }
  if (marker_style < 0 || marker_style >= kMarkerStyleCount) {
    throw Error(ErrorCode::kInvalidArgument, "unknown marker style");
  }
}

void ShiftSpec::validate() const {
  if (!(std::abs(yaw) <= std::numbers::pi)) {
    throw Error(ErrorCode::kInvalidArgument, "shift yaw must lie in [-pi, pi]");
  }
  if (style < -1 || style >= kMarkerStyleCount) {
    throw Error(ErrorCode::kInvalidArgument, "unknown marker style");
  }
}

std::vector<MarkerSplat> marker_splats(int style) {
  // EE frame: z is the approach direction, x the finger opening axis.
  std::vector<MarkerSplat> out;
  const auto finger_pair = [&](double x, double length, double r, Rgb c) {
    for (double z = 0.0; z >= -length - 1e-12; z -= 0.0125) {
      out.push_back({Vec3(x, 0.0, z), r, c});
      out.push_back({Vec3(-x, 0.0, z), r, c});
    }
  };
  switch (style) {
    case kParallelJaw:
      finger_pair(0.04, 0.0375, 0.011, {70, 70, 70});
      for (int i = -3; i <= 3; ++i) {
        out.push_back({Vec3(0.03 * i, 0.0, -0.065), 0.022, {235, 235, 232}});
      }
      break;
    case kWideJaw:
      finger_pair(0.055, 0.05, 0.013, {30, 30, 30});
      for (int i = -2; i <= 2; ++i) {
        out.push_back({Vec3(0.025 * i, 0.0, -0.075), 0.02, {55, 55, 60}});
      }
      out.push_back({Vec3(0.0, 0.0, -0.1), 0.035, {230, 120, 30}});
      break;
    case kInvisible:
      break;
    default:
      throw Error(ErrorCode::kInvalidArgument, "unknown marker style " + std::to_string(style));
  }
  return out;
}

std::vector<Sphere> arm_splats(const SceneSpec& scene, const Pose& ee_pose, int style) {
  Rgb color;
  switch (style) {
    case kParallelJaw: color = {236, 236, 232}; break;
    case kWideJaw: color = {70, 110, 170}; break;
    case kInvisible: return {};
    default: throw Error(ErrorCode::kInvalidArgument, "unknown marker style " + std::to_string(style));
  }
  const Vec3 up = scene.table.rotation.column(2);
  const Vec3 shoulder = scene.robot_base + kShoulderHeight * up;
  const Vec3 wrist = ee_pose.apply(Vec3(0.0, 0.0, -kWristOffset));
  const Vec3 mid = 0.5 * (shoulder + wrist);
  const double half = 0.5 * (wrist - shoulder).norm();
  const Vec3 elbow = mid + std::sqrt(std::max(0.0, kArmLink * kArmLink - half * half)) * up;

  std::vector<Sphere> out;
  for (const auto& [a, b] : {std::pair{shoulder, elbow}, std::pair{elbow, wrist}}) {
    const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / kArmSpacing)));
    for (int i = 0; i < n; ++i) {
      out.push_back(Sphere{a + (b - a) * (static_cast<double>(i) / n), kArmRadius, color});
    }
  }
  out.push_back(Sphere{wrist, kArmRadius, color});
  return out;
}

namespace {

std::uint32_t mix32(std::uint32_t h) {
  h ^= h >> 16;
  h *= 0x7feb352dU;
  h ^= h >> 15;
  h *= 0x846ca68bU;
  h ^= h >> 16;
  return h;
}

Rgb palette_color(std::int64_t i, std::int64_t j, std::uint32_t salt) {
  const std::uint32_t h =
      mix32(static_cast<std::uint32_t>(i) * 0x9e3779b1U ^ mix32(static_cast<std::uint32_t>(j) + salt));
  return Rgb{static_cast<std::uint8_t>(40 + (h & 0xff) % 180),
             static_cast<std::uint8_t>(40 + ((h >> 8) & 0xff) % 180),
             static_cast<std::uint8_t>(40 + ((h >> 16) & 0xff) % 180)};
}

}  // namespace

Rgb environment_color(const SceneSpec& scene, const Vec3& origin, const Vec3& direction) {
  const Rot3 rt = scene.table.rotation.transpose();
  const Vec3 o = rt * (origin - scene.table.translation);
  const Vec3 d = rt * direction;
  if (d.z() < 0.0) {
    if (o.z() > 0.0) {
      const double s = -o.z() / d.z();
      const double x = o.x() + s * d.x();
      const double y = o.y() + s * d.y();
      if (std::abs(x) <= kTableHalfX && std::abs(y) <= kTableHalfY) return kTableColor;
    }
    if (o.z() > -kFloorDepth) {
      const double s = (-kFloorDepth - o.z()) / d.z();
      const auto ti = static_cast<std::int64_t>(std::floor((o.x() + s * d.x()) / kFloorTile + 0.5));
      const auto tj = static_cast<std::int64_t>(std::floor((o.y() + s * d.y()) / kFloorTile + 0.5));
      return palette_color(ti, tj, 17U);
    }
  }
  // Panorama: 15 degree cells in azimuth and elevation. Cells and tiles are
  // centered on the frame axes.
  const double az = std::atan2(d.y(), d.x());
  const double el = std::atan2(d.z(), std::hypot(d.x(), d.y()));
  const auto sector = static_cast<std::int64_t>(std::floor(az / (std::numbers::pi / 12.0) + 0.5));
  const auto band = static_cast<std::int64_t>(std::floor(el / (std::numbers::pi / 12.0) + 0.5));
  return palette_color(sector, band, 101U);
}

ImageBuf render_scene(const SceneSpec& scene, const CameraCalib& calib, const Pose& ee_pose,
                      int style) {
  scene.validate();
  std::vector<Splat> splats;
  for (const auto& s : scene.spheres) {
    splats.push_back(make_splat(calib, s.center, s.radius, s.color, "sphere"));
  }
  if (!(to_camera(calib, ee_pose.translation).z() > kMinDepth)) {
    throw Error(ErrorCode::kNonPositiveDepth, "end-effector behind the camera");
  }
  for (const auto& s : arm_splats(scene, ee_pose, style)) {
    const Vec3 pc = to_camera(calib, s.center);
    // Arm links may leave the view; only the parts in front are drawn.
    if (pc.z() > kMinDepth) splats.push_back(make_splat(calib, s.center, s.radius, s.color, "arm"));
  }
  for (const auto& m : marker_splats(style)) {
    splats.push_back(make_splat(calib, ee_pose.apply(m.offset), m.radius, m.color, "marker"));
  }
  std::stable_sort(splats.begin(), splats.end(),
                   [](const Splat& a, const Splat& b) { return a.depth > b.depth; });

  ImageBuf img(calib.width, calib.height);
  const auto& k = calib.intrinsics;
  const Mat3& r = calib.pose.rotation.matrix();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Vec3 ray = r * Vec3((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
      img.set(x, y, environment_color(scene, calib.pose.translation, ray));
    }
  }
  for (const auto& s : splats) fill_disc(img, s);
  return img;
}

SceneState apply_shift(const SceneState& s, const ShiftSpec& shift) {
  shift.validate();
  SceneState out = s;
  const Vec3 delta(shift.dx, shift.dy, 0.0);
  for (auto& sp : out.scene.spheres) sp.center += delta;
  out.ee_pose.translation += delta;
  if (shift.yaw != 0.0) {
    const Rot3 rz = Rot3::about_z(shift.yaw);
    const Vec3& c = s.scene.workspace_center;
    out.calib.pose.rotation = rz * s.calib.pose.rotation;
    out.calib.pose.translation = c + rz * (s.calib.pose.translation - c);
  }
  if (shift.style >= 0) out.scene.marker_style = shift.style;
  return out;
}

SceneState apply_rigid(const SceneState& s, const Pose& t) {
  SceneState out = s;
  for (auto& sp : out.scene.spheres) sp.center = t.apply(sp.center);
  out.scene.workspace_center = t.apply(s.scene.workspace_center);
  out.scene.table = compose(t, s.scene.table);
  out.scene.robot_base = t.apply(s.scene.robot_base);
  out.ee_pose = compose(t, s.ee_pose);
  out.calib.pose = compose(t, s.calib.pose);
  return out;
}

// --- config / report ---------------------------------------------------------

void HarnessConfig::validate() const {
  align.validate();
  if (image_size < 8) throw Error(ErrorCode::kInvalidArgument, "image_size must be >= 8");
  if (feature_size < 1) throw Error(ErrorCode::kInvalidArgument, "feature_size must be >= 1");
  if (!(proprio_weight >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "proprio_weight < 0");
  if (!(min_workspace_shift >= 0.0 && min_workspace_shift <= max_workspace_shift)) {
    throw Error(ErrorCode::kInvalidArgument, "workspace shift range is invalid");
  }
  if (!(max_yaw_deg >= 0.0 && max_yaw_deg <= 180.0)) {
    throw Error(ErrorCode::kInvalidArgument, "max_yaw_deg must lie in [0, 180]");
  }
  if (!(pixel_jitter >= 0.0 && proprio_noise >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "jitter magnitudes must be >= 0");
  }
}

Json to_json(const HarnessConfig& cfg) {
  Json h;
  h["fx"] = cfg.intrinsics.fx;
  h["fy"] = cfg.intrinsics.fy;
  h["cx"] = cfg.intrinsics.cx;
  h["cy"] = cfg.intrinsics.cy;
  h["image_size"] = cfg.image_size;
  h["feature_size"] = cfg.feature_size;
  h["proprio_weight"] = cfg.proprio_weight;
  h["n_scenes"] = cfg.n_scenes;
  h["n_demos"] = cfg.n_demos;
  h["n_eval"] = cfg.n_eval;
  h["min_workspace_shift"] = cfg.min_workspace_shift;
  h["max_workspace_shift"] = cfg.max_workspace_shift;
  h["max_yaw_deg"] = cfg.max_yaw_deg;
  h["pixel_jitter"] = cfg.pixel_jitter;
  h["proprio_noise"] = cfg.proprio_noise;
  h["crop_sizes"] = cfg.crop_sizes;
  h["resolution_control"] = cfg.resolution_control;
  Json j;
  j["alignment"] = tcpalign::to_json(cfg.align);
  j["augment"] = tcpalign::to_json(cfg.align.augment);
  j["harness"] = h;
  return j;
}

void merge_json(const Json& j, HarnessConfig& cfg) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "config section 'harness' must be an object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "fx") cfg.intrinsics.fx = v.get<double>();
      else if (key == "fy") cfg.intrinsics.fy = v.get<double>();
      else if (key == "cx") cfg.intrinsics.cx = v.get<double>();
      else if (key == "cy") cfg.intrinsics.cy = v.get<double>();
      else if (key == "image_size") cfg.image_size = v.get<int>();
      else if (key == "feature_size") cfg.feature_size = v.get<int>();
      else if (key == "proprio_weight") cfg.proprio_weight = v.get<double>();
      else if (key == "n_scenes") cfg.n_scenes = v.get<int>();
      else if (key == "n_demos") cfg.n_demos = v.get<int>();
      else if (key == "n_eval") cfg.n_eval = v.get<int>();
      else if (key == "min_workspace_shift") cfg.min_workspace_shift = v.get<double>();
      else if (key == "max_workspace_shift") cfg.max_workspace_shift = v.get<double>();
      else if (key == "max_yaw_deg") cfg.max_yaw_deg = v.get<double>();
      else if (key == "pixel_jitter") cfg.pixel_jitter = v.get<double>();
      else if (key == "proprio_noise") cfg.proprio_noise = v.get<double>();
      else if (key == "crop_sizes") cfg.crop_sizes = v.get<std::vector<int>>();
      else if (key == "resolution_control") cfg.resolution_control = v.get<bool>();
      else throw Error(ErrorCode::kParseError, "unknown config field 'harness." + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, "config field 'harness." + key + "': " + e.what());
    }
  }
}

CameraCalib default_camera(const HarnessConfig& cfg, const Vec3& workspace_center) {
  CameraCalib c;
  c.intrinsics = cfg.intrinsics;
  c.width = cfg.image_size;
  c.height = cfg.image_size;
  c.pose = look_at(workspace_center + Vec3(0.85, 0.0, 0.7),
                   workspace_center + Vec3(0.0, 0.0, 0.05));
  c.validate();
  return c;
}

double ReportRow::get(const std::string& name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

const ReportRow* ExperimentReport::row(const std::string& condition) const {
  for (const auto& r : rows)
    if (r.condition == condition) return &r;
  return nullptr;
}

double ExperimentReport::metric(const std::string& condition, const std::string& name) const {
  const ReportRow* r = row(condition);
  return r ? r->get(name) : std::numeric_limits<double>::quiet_NaN();
}

Json ExperimentReport::to_json() const {
  Json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["config"] = config;
  Json rs = Json::array();
  for (const auto& r : rows) {
    Json o;
    o["condition"] = r.condition;
    for (const auto& [k, v] : r.metrics) o[k] = v;
    rs.push_back(std::move(o));
  }
  j["rows"] = std::move(rs);
  return j;
}

std::string ExperimentReport::to_csv() const {
  std::vector<std::string> names;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.metrics)
      if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(k);
  std::ostringstream os;
  os << "condition";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (const auto& r : rows) {
    os << r.condition;
    for (const auto& n : names) {
      const double v = r.get(n);
      os << ',';
      if (!std::isnan(v)) os << format_scalar(v);
    }
    os << '\n';
  }
  return os.str();
}

double mean_l1(const ImageBuf& a, const ImageBuf& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "mean_l1 inputs differ in size");
  }
  const auto x = a.bytes();
  const auto y = b.bytes();
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += static_cast<std::uint64_t>(std::abs(x[i] - y[i]));
  return static_cast<double>(sum) / (255.0 * static_cast<double>(x.size()));
}

// --- sampling ------------------------------------------------------------------

SceneState sample_scene(const HarnessConfig& cfg, FrameRng& rng) {
  SceneState s;
  s.scene.workspace_center = Vec3(0.5, 0.0, 0.0);
  s.scene.z_table = 0.0;
  s.scene.table = Pose{Rot3(), s.scene.workspace_center, Frame::kWorld, Frame::kWorld};
  s.scene.table.translation.z() = s.scene.z_table;
  s.scene.robot_base = s.scene.workspace_center + Vec3(-0.55, 0.0, s.scene.z_table);
  s.calib = default_camera(cfg, s.scene.workspace_center);

  const Vec3& w = s.scene.workspace_center;
  const double r = rng.uniform(0.025, 0.035);
  Sphere target{Vec3(w.x() + rng.uniform(-0.08, 0.08), w.y() + rng.uniform(-0.08, 0.08), r), r,
                kTargetColor};
  s.scene.spheres.push_back(target);
  for (int i = 0; i < 3; ++i) {
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double dist = rng.uniform(0.15, 0.3);
    const double rd = rng.uniform(0.02, 0.045);
    const Rgb color = kDistractorColors[rng.uniform_int(std::size(kDistractorColors))];
    s.scene.spheres.push_back(Sphere{Vec3(target.center.x() + dist * std::cos(angle),
                                          target.center.y() + dist * std::sin(angle), rd),
                                     rd, color});
  }
  const Vec3 start = target.center + Vec3(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1),
                                          rng.uniform(0.06, 0.18));
  const double yaw = rng.uniform(-std::numbers::pi / 3.0, std::numbers::pi / 3.0);
  s.ee_pose = Pose{Rot3::about_z(yaw) * Rot3::about_x(std::numbers::pi), start, Frame::kWorld,
                   Frame::kTool};
  s.scene.marker_style = kParallelJaw;
  return s;
}

ShiftSpec sample_shift(const HarnessConfig& cfg, const std::string& family, FrameRng& rng) {
  ShiftSpec shift;
  const auto workspace = [&] {
    const double r = rng.uniform(cfg.min_workspace_shift, cfg.max_workspace_shift);
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    shift.dx = r * std::cos(phi);
    shift.dy = r * std::sin(phi);
  };
  const auto viewpoint = [&] {
    shift.yaw = rng.uniform(-cfg.max_yaw_deg, cfg.max_yaw_deg) * kDegToRad;
  };
  if (family == "in_domain") {
  } else if (family == "workspace") {
    workspace();
  } else if (family == "viewpoint") {
    viewpoint();
  } else if (family == "combined") {
    workspace();
    viewpoint();
  } else if (family == "embodiment") {
    shift.style = kWideJaw;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown shift family '" + family + "'");
  }
  return shift;
}

std::vector<DemoFrame> scripted_demo(const SceneState& start) {
  start.scene.validate();
  const Vec3 grasp = start.scene.spheres.front().center;
  Pose ee = start.ee_pose;
  std::vector<DemoFrame> frames;
  for (int step = 0; step < 64; ++step) {
    const Vec3 d = grasp - ee.translation;
    if (d.norm() < kCloseDistance) {
      frames.push_back({ee, 0.08, Vec3::Zero(), 0.0});
      frames.push_back({ee, 0.0, Vec3::Zero(), 0.0});
      break;
    }
    const Vec3 action = d.norm() > kMaxStep ? Vec3(d * (kMaxStep / d.norm())) : d;
    frames.push_back({ee, 0.08, action, 1.0});
    ee.translation += action;
  }
  return frames;
}

std::vector<float> observation_features(const HarnessConfig& cfg, FeatureKind kind,
                                        const SceneState& s, double gripper_width,
                                        const CalibrationJitter& jitter) {
  return features_from_image(cfg, kind, render_scene(s), s, gripper_width, jitter);
}

std::size_t nearest_neighbor(const std::vector<std::vector<float>>& database,
                             const std::vector<float>& query) {
  if (database.empty()) throw Error(ErrorCode::kInvalidArgument, "empty retrieval database");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < database.size(); ++i) {
    const auto& row = database[i];
    if (row.size() != query.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "feature length mismatch");
    }
    double d = 0.0;
    for (std::size_t j = 0; j < row.size() && d < best_d; ++j) {
      const double e = static_cast<double>(row[j]) - query[j];
      d += e * e;
    }
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// --- experiments -------------------------------------------------------------

ExperimentReport invariance_benchmark(const HarnessConfig& cfg, int n_scenes, std::uint64_t seed) {
  cfg.validate();
  if (n_scenes < 1) throw Error(ErrorCode::kInvalidArgument, "n_scenes must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> families = {"workspace", "viewpoint", "combined", "embodiment",
                                             "conjugate"};
  AlignmentConfig no_overlay = cfg.align;
  no_overlay.overlay_enabled = false;
  const int out = cfg.align.output_size;

  struct Trial {
    double raw = 0.0, aligned = 0.0, aligned_no_overlay = 0.0;
  };
  std::vector<Trial> trials(families.size() * n_scenes);
  parallel_for(n_scenes, cfg.workers, [&](int i) {
    FrameRng rng = derive_rng(seed, "invariance", i, "scene");
    SceneState s = sample_scene(cfg, rng);
    const std::vector<DemoFrame> frames = scripted_demo(s);
    s.ee_pose = frames[rng.uniform_int(frames.size())].ee_pose;
    const ImageBuf img = render_scene(s);
    const ImageBuf raw = resize_to(img, out);
    const ImageBuf aligned = align_visual(img, s.calib, s.ee_pose, cfg.align).image;
    const ImageBuf aligned_plain = align_visual(img, s.calib, s.ee_pose, no_overlay).image;

    for (std::size_t f = 0; f < families.size(); ++f) {
      FrameRng shift_rng = derive_rng(seed, "invariance-" + families[f], i, "shift");
      SceneState shifted;
      if (families[f] == "conjugate") {
        const Pose t{random_rotation(shift_rng),
                     Vec3(shift_rng.uniform(-0.5, 0.5), shift_rng.uniform(-0.5, 0.5),
                          shift_rng.uniform(-0.5, 0.5)),
                     Frame::kWorld, Frame::kWorld};
        shifted = apply_rigid(s, t);
      } else {
        shifted = apply_shift(s, sample_shift(cfg, families[f], shift_rng));
      }
      const ImageBuf img2 = render_scene(shifted);
      Trial& t = trials[f * n_scenes + i];
      t.raw = mean_l1(raw, resize_to(img2, out));
      t.aligned = mean_l1(aligned, align_visual(img2, shifted.calib, shifted.ee_pose, cfg.align).image);
      t.aligned_no_overlay = mean_l1(
          aligned_plain, align_visual(img2, shifted.calib, shifted.ee_pose, no_overlay).image);
    }
  });

  ExperimentReport report;
  report.experiment = "invariance";
  report.seed = seed;
  report.config = to_json(cfg);
  for (std::size_t f = 0; f < families.size(); ++f) {
    double raw = 0.0, aligned = 0.0, plain = 0.0, max_aligned = 0.0;
    int below = 0;
    for (int i = 0; i < n_scenes; ++i) {
      const Trial& t = trials[f * n_scenes + i];
      raw += t.raw;
      aligned += t.aligned;
      plain += t.aligned_no_overlay;
      max_aligned = std::max(max_aligned, t.aligned);
      if (t.aligned < t.raw) ++below;
    }
    ReportRow row{families[f], {}};
    row.metrics = {{"raw_discrepancy", raw / n_scenes},
                   {"aligned_discrepancy", aligned / n_scenes},
                   {"aligned_discrepancy_no_overlay", plain / n_scenes},
                   {"max_aligned_discrepancy", max_aligned},
                   {"fraction_aligned_below_raw", static_cast<double>(below) / n_scenes}};
    if (raw > 0.0) row.metrics.emplace_back("ratio", aligned / raw);
    report.rows.push_back(std::move(row));
  }
  report.elapsed_ms = elapsed_ms_since(t0);
  return report;
}

ExperimentReport retrieval_experiment(const HarnessConfig& cfg, int n_demos, int n_eval,
                                      std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  RetrievalOptions opt;
  opt.kinds = {FeatureKind::kRaw, FeatureKind::kAligned};
  if (cfg.resolution_control) opt.kinds.push_back(FeatureKind::kRawHighRes);
  opt.families = retrieval_families();
  const RetrievalResult r = run_retrieval(cfg, n_demos, n_eval, seed, opt);

  ExperimentReport report;
  report.experiment = "retrieval";
  report.seed = seed;
  report.config = to_json(cfg);
  for (std::size_t f = 0; f < opt.families.size(); ++f) {
    ReportRow row{opt.families[f], {{"raw_error", r.mean_error[0][f]},
                                    {"aligned_error", r.mean_error[1][f]}}};
    if (cfg.resolution_control) row.metrics.emplace_back("raw_highres_error", r.mean_error[2][f]);
    report.rows.push_back(std::move(row));
  }
  const double in_domain = r.mean_error[1][0];
  const double ood = mean_ood(r.mean_error[1]);
  report.rows.push_back(ReportRow{"summary",
                                  {{"aligned_in_domain_error", in_domain},
                                   {"aligned_ood_error", ood},
                                   {"raw_in_domain_error", r.mean_error[0][0]},
                                   {"raw_ood_error", mean_ood(r.mean_error[0])},
                                   {"delta", in_domain > 0.0 ? ood / in_domain - 1.0 : 0.0},
                                   {"database_size", static_cast<double>(r.database_size)},
                                   {"queries_per_family", static_cast<double>(n_eval)}}});
  report.elapsed_ms = elapsed_ms_since(t0);
  return report;
}

ExperimentReport crop_size_sweep(const HarnessConfig& cfg, const std::vector<int>& sizes,
                                 std::uint64_t seed) {
  if (sizes.empty()) throw Error(ErrorCode::kInvalidArgument, "crop size list is empty");
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.experiment = "crop-sweep";
  report.seed = seed;
  report.config = to_json(cfg);
  report.config["harness"]["crop_sizes"] = sizes;
  RetrievalOptions opt;
  opt.kinds = {FeatureKind::kAligned};
  opt.families = retrieval_families();
  for (int kappa : sizes) {
    HarnessConfig c = cfg;
    c.align.kappa = kappa;
    const RetrievalResult r = run_retrieval(c, cfg.n_demos, cfg.n_eval, seed, opt);
    ReportRow row{"kappa=" + std::to_string(kappa),
                  {{"kappa", static_cast<double>(kappa)},
                   {"aligned_in_domain_error", r.mean_error[0][0]},
                   {"aligned_ood_error", mean_ood(r.mean_error[0])}}};
    for (std::size_t f = 1; f < opt.families.size(); ++f) {
      row.metrics.emplace_back(opt.families[f] + "_error", r.mean_error[0][f]);
    }
    report.rows.push_back(std::move(row));
  }
  report.elapsed_ms = elapsed_ms_since(t0);
  return report;
}

ExperimentReport calibration_robustness(const HarnessConfig& cfg, double pixel_jitter,
                                        double proprio_noise, std::uint64_t seed) {
  if (!(pixel_jitter >= 0.0) || !(proprio_noise >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "jitter magnitudes must be >= 0");
  }
  const auto t0 = std::chrono::steady_clock::now();
  RetrievalOptions base;
  base.kinds = {FeatureKind::kAligned};
  base.families = retrieval_families();
  RetrievalOptions jittered = base;
  jittered.pixel_jitter = pixel_jitter;
  jittered.proprio_noise = proprio_noise;

  const RetrievalResult r0 = run_retrieval(cfg, cfg.n_demos, cfg.n_eval, seed, base);
  const RetrievalResult r1 = (pixel_jitter == 0.0 && proprio_noise == 0.0)
                                 ? r0
                                 : run_retrieval(cfg, cfg.n_demos, cfg.n_eval, seed, jittered);

  ExperimentReport report;
  report.experiment = "calibration";
  report.seed = seed;
  report.config = to_json(cfg);
  report.config["harness"]["pixel_jitter"] = pixel_jitter;
  report.config["harness"]["proprio_noise"] = proprio_noise;
  const auto make_row = [&](const std::string& name, const RetrievalResult& r, double pj,
                            double pn) {
    ReportRow row{name,
                  {{"pixel_jitter", pj},
                   {"proprio_noise", pn},
                   {"aligned_in_domain_error", r.mean_error[0][0]},
                   {"aligned_ood_error", mean_ood(r.mean_error[0])}}};
    for (std::size_t f = 1; f < base.families.size(); ++f) {
      row.metrics.emplace_back(base.families[f] + "_error", r.mean_error[0][f]);
    }
    return row;
  };
  report.rows.push_back(make_row("baseline", r0, 0.0, 0.0));
  std::ostringstream name;
  name << "jitter=" << format_scalar(pixel_jitter) << "px,noise=" << format_scalar(proprio_noise);
  ReportRow row = make_row(name.str(), r1, pixel_jitter, proprio_noise);
  const double base_ood = mean_ood(r0.mean_error[0]);
  row.metrics.emplace_back("ood_ratio_to_baseline",
                           base_ood > 0.0 ? mean_ood(r1.mean_error[0]) / base_ood : 1.0);
  report.rows.push_back(std::move(row));
  report.elapsed_ms = elapsed_ms_since(t0);
  return report;
}

ExperimentReport motion_encoding(const HarnessConfig& cfg, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  HarnessConfig c = cfg;
  // An overlay would reveal the hidden EE inside the object-centric crop.
  c.align.overlay_enabled = false;
  RetrievalOptions opt;
  opt.kinds = {FeatureKind::kAlignedZOnly, FeatureKind::kObjectCentric};
  opt.families = {"in_domain"};
  opt.style_override = kInvisible;
  const RetrievalResult r = run_retrieval(c, c.n_demos, c.n_eval, seed, opt);

  ExperimentReport report;
  report.experiment = "motion";
  report.seed = seed;
  report.config = to_json(c);
  report.rows.push_back(ReportRow{"tcp_centric", {{"in_domain_error", r.mean_error[0][0]}}});
  report.rows.push_back(ReportRow{"object_centric", {{"in_domain_error", r.mean_error[1][0]}}});
  report.elapsed_ms = elapsed_ms_since(t0);
  return report;
}

ExperimentReport run_experiment(const std::string& name, const HarnessConfig& cfg,
                                std::uint64_t seed) {
  if (name == "invariance") return invariance_benchmark(cfg, cfg.n_scenes, seed);
  if (name == "retrieval") return retrieval_experiment(cfg, cfg.n_demos, cfg.n_eval, seed);
  if (name == "crop-sweep") return crop_size_sweep(cfg, cfg.crop_sizes, seed);
  if (name == "calibration") {
    return calibration_robustness(cfg, cfg.pixel_jitter, cfg.proprio_noise, seed);
  }
  if (name == "motion") return motion_encoding(cfg, seed);
  throw Error(ErrorCode::kInvalidArgument, "unknown experiment '" + name + "'");
}

}  // namespace tcpalign::harness
