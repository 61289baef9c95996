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

#ifndef TCPALIGN_DATASET_HPP_
#define TCPALIGN_DATASET_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcpalign/align.hpp"
#include "tcpalign/geometry.hpp"

namespace tcpalign {

/// Rotations read from text are accepted within this tolerance and then
/// snapped onto SO(3).
inline constexpr double kFileRotationTolerance = 1e-6;

struct FrameRecord {
  std::uint64_t index = 0;
  std::string image_path;  // relative to the dataset root
  Pose ee_pose;
  double gripper_width = 0.0;
  /// Relative action: translation delta (3), rotation delta as 6D (6),
  /// gripper command (1).
  std::array<double, 10> action{};
  /// Calibration error injected by jitter_calibration; absent in loaded data.
  std::optional<CalibrationJitter> jitter;
};

struct TrajectoryManifest {
  std::string id;
  std::string camera_id;
  std::vector<FrameRecord> frames;
};

/// On disk: `manifest.json` (cameras, metadata, trajectory list) next to one
/// `traj_<id>.jsonl` per trajectory, one frame per line.
struct DatasetManifest {
  std::filesystem::path root;
  std::string robot;
  double gripper_open_ref = 0.08;
  double gripper_close_ref = 0.0;
  double z_table = 0.0;
  std::map<std::string, CameraCalib> cameras;
  std::vector<TrajectoryManifest> trajectories;

  std::size_t frame_count() const;
};

/// Parses and eagerly validates a manifest. Throws kParseError (with
/// file:line and field), kMissingCamera or kInvalidCalibration.
DatasetManifest load_manifest(const std::filesystem::path& manifest_path);

/// Throws kMissingCamera / kInvalidCalibration / kParseError on a violated
/// invariant.
void validate_manifest(const DatasetManifest& ds);

struct FrameError {
  std::string trajectory;
  std::uint64_t frame = 0;
  std::string message;
};

struct StageTiming {
  double load_ms = 0.0;
  double align_ms = 0.0;
  double write_ms = 0.0;
};

struct PreprocessReport {
  std::size_t frames_total = 0;
  std::size_t frames_written = 0;
  std::size_t clamped_frames = 0;
  std::vector<FrameError> errors;
  /// Summed over workers; wall-clock dependent, so it is never written into
  /// the output tree.
  StageTiming timing;
};

/// Aligns every frame into `out_dir`:
///   aligned/images/<traj>/<frame>.png, aligned/proprio_<traj>.csv
/// Frames that fail are skipped and recorded in the report. The output is
/// byte-identical for any `workers` value.
PreprocessReport preprocess_dataset(const DatasetManifest& ds, const AlignmentConfig& cfg,
                                    const std::filesystem::path& out_dir, int workers = 0);

/// Copy of `ds` in which every frame carries a calibration jitter drawn from
/// `rng` (frames in trajectory order).
DatasetManifest jitter_calibration(const DatasetManifest& ds, double pixel_jitter,
                                   double proprio_noise, FrameRng& rng);

/// Column header of the aligned proprio CSV.
std::string proprio_csv_header();

/// Shortest text that round-trips at 9 significant digits.
std::string format_scalar(double v);

}  // namespace tcpalign

#endif  // TCPALIGN_DATASET_HPP_
