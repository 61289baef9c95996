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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "tcpalign/align.hpp"
#include "tcpalign/error.hpp"

using namespace tcpalign;

namespace {

CameraCalib camera(const oracle::M3& r, const oracle::V3& t, int w = 256, int h = 192) {
  CameraCalib c;
  c.intrinsics = {220.0, 210.0, w / 2.0 + 0.3, h / 2.0 - 0.4};
  c.width = w;
  c.height = h;
  c.pose = Pose{oracle::to_rot3(r), Vec3(t[0], t[1], t[2]), Frame::kWorld, Frame::kCamera};
  return c;
}

Pose ee_in_front(oracle::Rng& rng, const CameraCalib& c) {
  const oracle::M3 r = oracle::random_rotation(rng);
  const Vec3 local(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(0.6, 1.5));
  return Pose{oracle::to_rot3(r), c.pose.apply(local), Frame::kWorld, Frame::kTool};
}

}  // namespace

TEST_CASE("degenerate alignment returns the input") {
  oracle::Rng rng(81);
  const ImageBuf img = oracle::random_image(rng, 64, 64);
  CameraCalib c;
  c.intrinsics = {80, 80, 32, 32};
  c.width = c.height = 64;
  c.pose = Pose{Rot3(), Vec3::Zero(), Frame::kWorld, Frame::kCamera};
  AlignmentConfig cfg;
  cfg.kappa = 64;
  cfg.output_size = 64;
  cfg.overlay_enabled = false;
  const Pose ee{Rot3(), Vec3(0, 0, 1), Frame::kWorld, Frame::kTool};
  const VisualAligned v = align_visual(img, c, ee, cfg);
  CHECK(v.image == img);
  CHECK_FALSE(v.clamped);
}

TEST_CASE("crop is centered on the projected TCP, shifted by jitter") {
  oracle::Rng rng(82);
  for (int t = 0; t < 100; ++t) {
    const CameraCalib c = camera(oracle::random_rotation(rng), oracle::random_vec(rng, 1.0));
    const ImageBuf img = oracle::random_image(rng, c.width, c.height);
    const Pose ee = ee_in_front(rng, c);
    AlignmentConfig cfg;
    cfg.kappa = 2 * rng.integer(4, 60);
    cfg.overlay_enabled = false;
    const Pixel tcp = project_point(c, ee.translation);
    CalibrationJitter j;
    j.du = rng.uniform(-5, 5);
    j.dv = rng.uniform(-5, 5);
    const CropResult r = crop_and_overlay(img, c, ee, cfg, j);
    if (r.clamped) continue;
    CHECK(r.image == oracle::crop(img, tcp.u + j.du, tcp.v + j.dv, cfg.kappa));
  }
}

TEST_CASE("overlay marks the crop center with the last-drawn axis") {
  oracle::Rng rng(83);
  int checked = 0;
  for (int t = 0; t < 50; ++t) {
    const CameraCalib c = camera(oracle::random_rotation(rng), oracle::random_vec(rng, 1.0));
    const ImageBuf img(c.width, c.height, Rgb{10, 10, 10});
    const Pose ee = ee_in_front(rng, c);
    AlignmentConfig cfg;
    cfg.kappa = 100;
    const CropResult r = crop_and_overlay(img, c, ee, cfg);
    if (r.clamped) continue;
    CHECK(r.image.at(50, 50) == kAxisColors[2]);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("overlay follows the jittered crop window") {
  const CameraCalib c = camera(oracle::identity(), {0, 0, 0});
  const ImageBuf img(c.width, c.height, Rgb{10, 10, 10});
  const Pose ee{Rot3(), Vec3(0, 0, 1), Frame::kWorld, Frame::kTool};
  AlignmentConfig cfg;
  cfg.kappa = 64;
  CalibrationJitter j;
  j.du = 4.0;
  j.dv = -3.0;
  CHECK(crop_and_overlay(img, c, ee, cfg, j).image == crop_and_overlay(img, c, ee, cfg).image);
}

TEST_CASE("gripper binarization") {
  CHECK(binarize_gripper(0.08, 0.08, 0.0) == 1);
  CHECK(binarize_gripper(0.0, 0.08, 0.0) == 0);
  CHECK(binarize_gripper(0.04, 0.08, 0.0) == 0);  // tie closes
  CHECK(binarize_gripper(0.0401, 0.08, 0.0) == 1);
  CHECK(binarize_gripper(-0.01, 0.08, 0.0) == 0);
  CHECK(binarize_gripper(0.2, 0.08, 0.0) == 1);
  try {
    binarize_gripper(0.03, 0.05, 0.05);
    FAIL("expected InvalidReference");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidReference);
  }
}

TEST_CASE("aligned proprio matches the oracle") {
  oracle::Rng rng(84);
  AlignmentConfig cfg;
  for (int t = 0; t < 200; ++t) {
    const oracle::M3 rc = oracle::random_rotation(rng), rh = oracle::random_rotation(rng);
    const CameraCalib c = camera(rc, oracle::random_vec(rng, 1.0));
    const double z = rng.uniform(-0.2, 0.8);
    const Pose ee{oracle::to_rot3(rh), Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), z),
                  Frame::kWorld, Frame::kTool};
    const double width = rng.uniform(0, 0.08);
    const ProprioAligned p = align_proprio(ee, width, c, cfg);
    const oracle::M3 rel = oracle::mul(oracle::transpose(rc), rh);
    const std::array<double, 6> want = {rel[0][0], rel[1][0], rel[2][0],
                                        rel[0][1], rel[1][1], rel[2][1]};
    for (int i = 0; i < 6; ++i) CHECK(std::abs(p.r6d.v[i] - want[i]) < 1e-12);
    CHECK(p.z == z);
    CHECK(p.g == (std::abs(width - 0.08) < std::abs(width) ? 1 : 0));
    const auto vals = p.values();
    CHECK(vals.size() == 8);
    CHECK(vals[6] == z);
  }
}

TEST_CASE("aligned proprio ignores planar position and camera translation") {
  const CameraCalib c = camera(oracle::identity(), {0, 0, 0});
  CameraCalib moved = c;
  moved.pose.translation = Vec3(3, -2, 1);
  AlignmentConfig cfg;
  const Pose a{Rot3::about_y(0.3), Vec3(0.1, 0.2, 0.3), Frame::kWorld, Frame::kTool};
  Pose b = a;
  b.translation = Vec3(-0.5, 0.7, 0.3);
  const auto pa = align_proprio(a, 0.08, c, cfg).values();
  CHECK(align_proprio(b, 0.08, c, cfg).values() == pa);
  CHECK(align_proprio(a, 0.08, moved, cfg).values() == pa);
}

TEST_CASE("calibration jitter") {
  FrameRng r = derive_rng(0, "j", 0, "calibration-jitter");
  CHECK(sample_calibration_jitter(r, 0.0, 0.0).is_zero());
  for (int i = 0; i < 500; ++i) {
    const CalibrationJitter j = sample_calibration_jitter(r, 5.0, 0.005);
    CHECK(std::abs(j.du) <= 5.0);
    CHECK(std::abs(j.dv) <= 5.0);
    for (double v : j.proprio) CHECK(std::abs(v) < 0.05);
  }
  CHECK_THROWS_AS(sample_calibration_jitter(r, -1.0, 0.0), Error);

  ProprioAligned p;
  p.r6d = rot_to_6d(Rot3());
  p.z = 0.2;
  p.g = 1;
  CalibrationJitter j;
  j.proprio = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  const ProprioAligned q = apply_proprio_jitter(p, j);
  CHECK(q.r6d.v[0] == doctest::Approx(1.1));
  CHECK(q.z == doctest::Approx(0.9));
  CHECK(q.g == 1);
}

TEST_CASE("alignment config validation") {
  AlignmentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.kappa = 4;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = AlignmentConfig{};
  cfg.output_size = 2;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = AlignmentConfig{};
  cfg.gripper_close_ref = cfg.gripper_open_ref;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
