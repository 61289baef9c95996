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

#ifndef TCPALIGN_ALIGN_HPP_
#define TCPALIGN_ALIGN_HPP_

#include <array>
#include <cstdint>

#include "tcpalign/augment.hpp"
#include "tcpalign/geometry.hpp"
#include "tcpalign/imaging.hpp"

namespace tcpalign {

struct AlignmentConfig {
  int kappa = 200;
  int output_size = 84;
  OverlaySpec overlay;
  bool overlay_enabled = true;
  double gripper_open_ref = 0.08;
  double gripper_close_ref = 0.0;
  AugmentConfig augment;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Aligned proprioception: camera-frame EE rotation (6D), world height, and
/// binary gripper state. Planar (x, y) position is deliberately absent.
struct ProprioAligned {
  Rot6D r6d;
  double z = 0.0;
  int g = 0;

  static constexpr std::size_t kSize = 8;
  std::array<double, kSize> values() const;
};

/// Per-frame calibration error model: a pixel offset applied to the projected
/// TCP and additive noise on the continuous proprio scalars (r6d, z). The
/// binary gripper state is never perturbed.
struct CalibrationJitter {
  double du = 0.0;
  double dv = 0.0;
  std::array<double, 7> proprio{};

  bool is_zero() const;
};

/// Offsets uniform in [-pixel_jitter, pixel_jitter] per axis; proprio noise
/// zero-mean Gaussian with standard deviation `proprio_noise`.
CalibrationJitter sample_calibration_jitter(FrameRng& rng, double pixel_jitter,
                                            double proprio_noise);

/// Crop around the projected TCP (plus `jitter` offset) with the axis overlay
/// drawn in crop coordinates. No resize.
CropResult crop_and_overlay(const ImageBuf& img, const CameraCalib& calib, const Pose& ee_pose,
                            const AlignmentConfig& cfg, const CalibrationJitter& jitter = {});

struct VisualAligned {
  ImageBuf image;
  bool clamped = false;
};

/// Full visual alignment: project, crop, overlay, resize to output_size.
/// Throws kNonPositiveDepth when the TCP is not in front of the camera.
VisualAligned align_visual(const ImageBuf& img, const CameraCalib& calib, const Pose& ee_pose,
                           const AlignmentConfig& cfg, const CalibrationJitter& jitter = {});

/// 1 when `width` is strictly nearer the open reference, else 0 (ties close).
/// Throws kInvalidReference when the references coincide.
int binarize_gripper(double width, double open_ref, double close_ref);

ProprioAligned align_proprio(const Pose& ee_pose, double gripper_width, const CameraCalib& calib,
                             const AlignmentConfig& cfg);

/// align_proprio with the jitter's proprio noise added.
ProprioAligned apply_proprio_jitter(ProprioAligned p, const CalibrationJitter& jitter);

}  // namespace tcpalign

#endif  // TCPALIGN_ALIGN_HPP_
