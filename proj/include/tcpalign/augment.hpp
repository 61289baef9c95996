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

#ifndef TCPALIGN_AUGMENT_HPP_
#define TCPALIGN_AUGMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcpalign/imaging.hpp"

namespace tcpalign {

/// Deterministic random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the real-valued draws are done here
/// rather than with <random> distributions, whose algorithms vary between
/// standard libraries.
class FrameRng {
 public:
  explicit FrameRng(std::uint64_t key) : engine_(key) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform in [0, n); n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n) { return engine_() % n; }
  /// Standard normal (Box–Muller, one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Stream keyed by (seed, trajectory, frame, tag). Equal keys give equal
/// streams; differing keys are decorrelated through a SplitMix64 chain.
FrameRng derive_rng(std::uint64_t seed, std::string_view traj_id, std::uint64_t frame_idx,
                    std::string_view tag);

struct AugmentConfig {
  bool enabled = false;
  double overlay_alpha = 0.5;
  double overlay_probability = 0.5;
  std::string overlay_pool;  // directory of PNG distractors
  double perspective_scale = 0.05;  // max corner shift as a fraction of the side
  double perspective_probability = 0.5;

  void validate() const;
};

/// Distractor images in `dir`, PNG files only, lexicographic filename order.
std::vector<ImageBuf> load_overlay_pool(const std::filesystem::path& dir);

/// Homography from the 4 exact correspondences (DLT with h33 = 1).
Homography homography_from_corners(std::span<const Pixel, 4> src, std::span<const Pixel, 4> dst);

/// Jitters each corner of a side x side square by up to
/// perspective_scale * side per axis. Non-convex draws are resampled up to 8
/// times before kDegenerateCorners is thrown.
Homography sample_perspective(FrameRng& rng, const AugmentConfig& cfg, int side);

/// With overlay_probability, blends a pool image (resized to the input size)
/// over `img` at overlay_alpha. Throws kEmptyPool when the probability is
/// positive and the pool is empty.
ImageBuf apply_random_overlay(FrameRng& rng, const ImageBuf& img, const AugmentConfig& cfg,
                              std::span<const ImageBuf> pool);

/// Random overlay then perspective jitter, each on its own keyed stream.
ImageBuf augment_frame(const ImageBuf& img, const AugmentConfig& cfg,
                       std::span<const ImageBuf> pool, std::uint64_t seed,
                       std::string_view traj_id, std::uint64_t frame_idx);

}  // namespace tcpalign

#endif  // TCPALIGN_AUGMENT_HPP_
