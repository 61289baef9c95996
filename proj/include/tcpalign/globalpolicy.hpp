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

#ifndef TCPALIGN_GLOBALPOLICY_HPP_
#define TCPALIGN_GLOBALPOLICY_HPP_

#include <variant>

#include "tcpalign/augment.hpp"
#include "tcpalign/geometry.hpp"
#include "tcpalign/imaging.hpp"

// Coarse reach policy: locate the target on the table from its segmentation
// and move the gripper above it by a pure (x, y) translation.
namespace tcpalign {

/// Either a binary object mask or an already computed centroid.
using SegmentationInput = std::variant<Mask, Pixel>;

struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

inline constexpr double kDefaultReachRadius = 0.02;

struct ReachTarget {
  double x = 0.0;
  double y = 0.0;
  double sample_radius = kDefaultReachRadius;
};

/// Mean (u, v) of set mask pixels. Throws kEmptyMask.
Pixel mask_centroid(const Mask& mask);

/// Centroid unprojected onto the table plane z = z_table.
PlanarPoint estimate_object_xy(const SegmentationInput& seg, const CameraCalib& calib,
                               double z_table);

/// Uniform sample in the disk of `radius` around (x_o, y_o).
PlanarPoint sample_reach_target(FrameRng& rng, double x_o, double y_o, double radius);

inline PlanarPoint sample_reach_target(FrameRng& rng, const ReachTarget& t) {
  return sample_reach_target(rng, t.x, t.y, t.sample_radius);
}

}  // namespace tcpalign

#endif  // TCPALIGN_GLOBALPOLICY_HPP_
