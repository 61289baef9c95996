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

#include "tcpalign/globalpolicy.hpp"

#include <cmath>
#include <numbers>
#include <type_traits>

#include "tcpalign/error.hpp"

namespace tcpalign {

Pixel mask_centroid(const Mask& mask) {
  double su = 0.0, sv = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y) == 0) continue;
      su += x;
      sv += y;
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorCode::kEmptyMask, "segmentation mask has no set pixels");
  return Pixel{su / static_cast<double>(n), sv / static_cast<double>(n)};
}

PlanarPoint estimate_object_xy(const SegmentationInput& seg, const CameraCalib& calib,
                               double z_table) {
  const Pixel c = std::visit(
      [](const auto& s) -> Pixel {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Mask>) {
          return mask_centroid(s);
        } else {
          return s;
        }
      },
      seg);
  const Vec3 p = unproject_to_plane(calib, c, z_table);
  return PlanarPoint{p.x(), p.y()};
}

PlanarPoint sample_reach_target(FrameRng& rng, double x_o, double y_o, double radius) {
  if (!(radius >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "reach radius must be >= 0");
  if (radius == 0.0) return PlanarPoint{x_o, y_o};
  const double r = radius * std::sqrt(rng.uniform());
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  return PlanarPoint{x_o + r * std::cos(theta), y_o + r * std::sin(theta)};
}

}  // namespace tcpalign
