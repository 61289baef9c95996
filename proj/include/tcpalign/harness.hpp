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

// Synthetic invariance harness.
//
// Scenes are spheres on a table seen by a pinhole camera, rendered by
// depth-sorted disc splats. The end-effector is drawn as a small set of
// marker splats whose layout and colors depend on a style id, which stands in
// for the robot embodiment. On top of that the harness runs:
//
//   * invariance_benchmark: pixel discrepancy between a scene and its shifted
//     copy, raw full view versus aligned crop;
//   * retrieval_experiment: scripted reach-grasp demonstrations, a 1-nearest
//     neighbour "policy" over raw or aligned features, action error in domain
//     and under each shift family;
//   * crop_size_sweep / calibration_robustness / motion_encoding: variants of
//     the retrieval experiment.
//
// Every experiment is a pure function of (config, seed). Work is spread over
// scenes or queries with OpenMP and merged in index order.

#ifndef TCPALIGN_HARNESS_HPP_
#define TCPALIGN_HARNESS_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tcpalign/align.hpp"
#include "tcpalign/config.hpp"
#include "tcpalign/geometry.hpp"
#include "tcpalign/imaging.hpp"

namespace tcpalign::harness {

enum MarkerStyle : int {
  kParallelJaw = 0,
  kWideJaw = 1,
  kInvisible = 2,
};
inline constexpr int kMarkerStyleCount = 3;

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.03;
  Rgb color = {200, 60, 60};
};

/// Static surroundings, all expressed in the table frame: a rectangular
/// table top at z = 0, a tiled floor below it and a panorama for rays that
/// hit neither.
inline constexpr double kTableHalfX = 0.6;
inline constexpr double kTableHalfY = 0.8;
inline constexpr double kFloorDepth = 0.75;
inline constexpr double kFloorTile = 0.25;
inline constexpr Rgb kTableColor = {168, 134, 98};

struct SceneSpec {
  std::vector<Sphere> spheres;
  double z_table = 0.0;
  Vec3 workspace_center = Vec3(0.5, 0.0, 0.0);
  int marker_style = kParallelJaw;
  /// World pose of the table frame (origin at the table-top center).
  Pose table = Pose{Rot3(), Vec3(0.5, 0.0, 0.0), Frame::kWorld, Frame::kWorld};
  /// Arm base in world coordinates; the arm is drawn from here to the wrist.
  Vec3 robot_base = Vec3(-0.1, 0.0, 0.0);

  void validate() const;
};

/// One out-of-distribution condition.
struct ShiftSpec {
  double dx = 0.0;  // meters, workspace translation
  double dy = 0.0;
  double yaw = 0.0;  // radians, camera orbit about the workspace-center z-axis
  int style = -1;    // replacement marker style; -1 keeps the current one

  void validate() const;
};

struct SceneState {
  SceneSpec scene;
  CameraCalib calib;
  Pose ee_pose;
};


/// Marker splats (EE-frame point, radius, color) for a style.
struct MarkerSplat {
  Vec3 offset;
  double radius;
  Rgb color;
};
std::vector<MarkerSplat> marker_splats(int style);

/// Arm model: shoulder above the base, elbow lifted so both links keep
/// kArmLink length when reachable, wrist behind the EE along its -z axis.
inline constexpr double kShoulderHeight = 0.33;
inline constexpr double kArmLink = 0.5;
inline constexpr double kWristOffset = 0.12;
inline constexpr double kArmRadius = 0.028;
inline constexpr double kArmSpacing = 0.02;
/// World-space splats of the arm; empty for the invisible style.
std::vector<Sphere> arm_splats(const SceneSpec& scene, const Pose& ee_pose, int style);

/// Color of the static surroundings seen along a world ray.
Rgb environment_color(const SceneSpec& scene, const Vec3& origin, const Vec3& direction);

/// Static surroundings first, then painter's-order disc splats: farther
/// first, ties by list order (spheres, arm, markers). Throws kNonPositiveDepth if any sphere center, the EE, or a
/// marker point is not in front of the camera.
ImageBuf render_scene(const SceneSpec& scene, const CameraCalib& calib, const Pose& ee_pose,
                      int style);
inline ImageBuf render_scene(const SceneState& s) {
  return render_scene(s.scene, s.calib, s.ee_pose, s.scene.marker_style);
}

/// Workspace delta moves spheres and EE (camera, table and arm base fixed); yaw orbits the camera
/// about the vertical axis through the workspace center (scene fixed); style
/// swaps the marker set only.
SceneState apply_shift(const SceneState& s, const ShiftSpec& shift);

/// The same rigid transform applied to every scene element, EE and camera.
SceneState apply_rigid(const SceneState& s, const Pose& transform);

struct HarnessConfig {
  AlignmentConfig align;
  CameraIntrinsics intrinsics{560.0, 560.0, 256.0, 256.0};
  int image_size = 512;
  /// Raw views are compared at the policy input size (align.output_size).
  int feature_size = 28;  // NN feature side, grayscale
  double proprio_weight = 5.0;
  int n_scenes = 100;
  int n_demos = 200;
  int n_eval = 100;
  double min_workspace_shift = 0.1;
  double max_workspace_shift = 0.3;
  double max_yaw_deg = 30.0;
  double pixel_jitter = 5.0;
  double proprio_noise = 0.005;
  std::vector<int> crop_sizes = {80, 120, 160, 200, 240};
  bool resolution_control = true;
  int workers = 0;  // 0 = OpenMP default

  void validate() const;
};

Json to_json(const HarnessConfig& cfg);
void merge_json(const Json& j, HarnessConfig& cfg);

/// Camera used for demonstrations: fixed front view of the workspace.
CameraCalib default_camera(const HarnessConfig& cfg, const Vec3& workspace_center);

struct ReportRow {
  std::string condition;
  std::vector<std::pair<std::string, double>> metrics;

  /// NaN when absent.
  double get(const std::string& name) const;
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  Json config;
  std::vector<ReportRow> rows;
  /// Wall clock; never serialized.
  double elapsed_ms = 0.0;

  const ReportRow* row(const std::string& condition) const;
  double metric(const std::string& condition, const std::string& name) const;
  Json to_json() const;
  std::string to_csv() const;
};

/// Mean absolute per-channel difference scaled to [0, 1].
double mean_l1(const ImageBuf& a, const ImageBuf& b);

/// Samples a demonstration-domain scene: a target sphere near the workspace
/// center, distractors around it, and the EE above the target.
SceneState sample_scene(const HarnessConfig& cfg, FrameRng& rng);

/// Shift families: "workspace", "viewpoint", "combined", "embodiment",
/// "conjugate". The first four are sampled from the configured ranges.
ShiftSpec sample_shift(const HarnessConfig& cfg, const std::string& family, FrameRng& rng);

ExperimentReport invariance_benchmark(const HarnessConfig& cfg, int n_scenes, std::uint64_t seed);

ExperimentReport retrieval_experiment(const HarnessConfig& cfg, int n_demos, int n_eval,
                                      std::uint64_t seed);

ExperimentReport crop_size_sweep(const HarnessConfig& cfg, const std::vector<int>& sizes,
                                 std::uint64_t seed);

ExperimentReport calibration_robustness(const HarnessConfig& cfg, double pixel_jitter,
                                        double proprio_noise, std::uint64_t seed);

/// Invisible markers, height-only proprio: TCP-centric versus object-centric
/// crops, in-domain retrieval error.
ExperimentReport motion_encoding(const HarnessConfig& cfg, std::uint64_t seed);

// Pieces of the retrieval experiment, exposed for tests.

/// Scripted reach-grasp: translate toward the grasp point in steps clipped to
/// kMaxStep, close once within kCloseDistance.
inline constexpr double kMaxStep = 0.02;
inline constexpr double kCloseDistance = 0.01;

struct DemoFrame {
  Pose ee_pose;
  double gripper_width = 0.08;
  Vec3 action = Vec3::Zero();  // world-frame translation delta
  double gripper_command = 1.0;
};
std::vector<DemoFrame> scripted_demo(const SceneState& start);

enum class FeatureKind {
  kRaw,            // full view + world-frame proprio (x, y, z, 6D, g)
  kRawHighRes,     // as kRaw at the aligned crop's pixel density
  kAligned,        // TCP crop + aligned proprio
  kAlignedZOnly,   // TCP crop + height only
  kObjectCentric,  // crop centered on the target sphere + height only
};

/// Feature vector for one observation. `jitter` only affects aligned kinds.
std::vector<float> observation_features(const HarnessConfig& cfg, FeatureKind kind,
                                        const SceneState& s, double gripper_width,
                                        const CalibrationJitter& jitter = {});

/// Index of the nearest row (squared L2), lowest index on ties.
std::size_t nearest_neighbor(const std::vector<std::vector<float>>& database,
                             const std::vector<float>& query);

/// Runs the experiment selected by name ("invariance", "retrieval",
/// "crop-sweep", "calibration", "motion"). Throws kInvalidArgument otherwise.
ExperimentReport run_experiment(const std::string& name, const HarnessConfig& cfg,
                                std::uint64_t seed);

}  // namespace tcpalign::harness

#endif  // TCPALIGN_HARNESS_HPP_
