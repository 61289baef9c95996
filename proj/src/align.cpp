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

#include "tcpalign/align.hpp"

#include <algorithm>
#include <cmath>

#include "tcpalign/error.hpp"

namespace tcpalign {

void AlignmentConfig::validate() const {
  static_cast<void>(CropSpec{kappa});
  if (output_size < 8) throw Error(ErrorCode::kInvalidArgument, "output_size must be >= 8");
  overlay.validate();
  augment.validate();
  if (gripper_open_ref == gripper_close_ref) {
    throw Error(ErrorCode::kInvalidReference, "gripper open and close references coincide");
  }
}

std::array<double, ProprioAligned::kSize> ProprioAligned::values() const {
  return {r6d.v[0], r6d.v[1], r6d.v[2], r6d.v[3], r6d.v[4], r6d.v[5], z,
          static_cast<double>(g)};
}

bool CalibrationJitter::is_zero() const {
  return du == 0.0 && dv == 0.0 &&
         std::all_of(proprio.begin(), proprio.end(), [](double v) { return v == 0.0; });
}

CalibrationJitter sample_calibration_jitter(FrameRng& rng, double pixel_jitter,
                                            double proprio_noise) {
  if (!(pixel_jitter >= 0.0) || !(proprio_noise >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "jitter magnitudes must be >= 0");
  }
  CalibrationJitter j;
  if (pixel_jitter > 0.0) {
    j.du = rng.uniform(-pixel_jitter, pixel_jitter);
    j.dv = rng.uniform(-pixel_jitter, pixel_jitter);
  }
  if (proprio_noise > 0.0) {
    for (double& v : j.proprio) v = proprio_noise * rng.normal();
  }
  return j;
}

CropResult crop_and_overlay(const ImageBuf& img, const CameraCalib& calib, const Pose& ee_pose,
                            const AlignmentConfig& cfg, const CalibrationJitter& jitter) {
  const Pixel tcp = project_point(calib, ee_pose.translation);
  const Pixel center{tcp.u + jitter.du, tcp.v + jitter.dv};
  CropResult crop = center_crop(img, center, CropSpec{cfg.kappa});
  if (cfg.overlay_enabled) {
    // Same camera, principal point moved into crop coordinates; the jitter
    // offset moves the overlay together with the crop window.
    CameraCalib local = calib;
    local.intrinsics.cx = calib.intrinsics.cx + jitter.du - crop.origin_x;
    local.intrinsics.cy = calib.intrinsics.cy + jitter.dv - crop.origin_y;
    local.width = cfg.kappa;
    local.height = cfg.kappa;
    crop.image = draw_axes_overlay(crop.image, local, ee_pose, cfg.overlay);
  }
  return crop;
}

VisualAligned align_visual(const ImageBuf& img, const CameraCalib& calib, const Pose& ee_pose,
                           const AlignmentConfig& cfg, const CalibrationJitter& jitter) {
  CropResult crop = crop_and_overlay(img, calib, ee_pose, cfg, jitter);
  return VisualAligned{resize_bilinear(crop.image, cfg.output_size, cfg.output_size),
                       crop.clamped};
}

int binarize_gripper(double width, double open_ref, double close_ref) {
  if (open_ref == close_ref) {
    throw Error(ErrorCode::kInvalidReference, "gripper open and close references coincide");
  }
  return std::abs(width - open_ref) < std::abs(width - close_ref) ? 1 : 0;
}

ProprioAligned align_proprio(const Pose& ee_pose, double gripper_width, const CameraCalib& calib,
                             const AlignmentConfig& cfg) {
  return ProprioAligned{rot_to_6d(camera_frame_rotation(calib.pose, ee_pose.rotation)),
                        ee_pose.translation.z(),
                        binarize_gripper(gripper_width, cfg.gripper_open_ref,
                                         cfg.gripper_close_ref)};
}

ProprioAligned apply_proprio_jitter(ProprioAligned p, const CalibrationJitter& jitter) {
  for (int i = 0; i < 6; ++i) p.r6d.v[i] += jitter.proprio[i];
  p.z += jitter.proprio[6];
  return p;
}

}  // namespace tcpalign
