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

#include "tcpalign/augment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "tcpalign/error.hpp"

namespace tcpalign {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double cross_z(const Pixel& o, const Pixel& a, const Pixel& b) {
  return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

bool strictly_convex(std::span<const Pixel, 4> q) {
  int sign = 0;
  for (int i = 0; i < 4; ++i) {
    const double c = cross_z(q[i], q[(i + 1) % 4], q[(i + 2) % 4]);
    if (c == 0.0) return false;
    const int s = c > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

}  // namespace

double FrameRng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

FrameRng derive_rng(std::uint64_t seed, std::string_view traj_id, std::uint64_t frame_idx,
                    std::string_view tag) {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ fnv1a(traj_id));
  k = splitmix64(k ^ frame_idx);
  k = splitmix64(k ^ fnv1a(tag));
  return FrameRng(k);
}

void AugmentConfig::validate() const {
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(overlay_alpha)) throw Error(ErrorCode::kInvalidArgument, "overlay_alpha not in [0,1]");
  if (!unit(overlay_probability) || !unit(perspective_probability)) {
    throw Error(ErrorCode::kInvalidArgument, "augmentation probability not in [0,1]");
  }
  if (!(perspective_scale >= 0.0 && perspective_scale < 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "perspective_scale not in [0, 0.5)");
  }
}

std::vector<ImageBuf> load_overlay_pool(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (dir.empty()) return {};
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "overlay pool is not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  std::vector<ImageBuf> pool;
  pool.reserve(files.size());
  for (const auto& f : files) pool.push_back(read_png(f));
  return pool;
}

Homography homography_from_corners(std::span<const Pixel, 4> src, std::span<const Pixel, 4> dst) {
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const double x = src[i].u, y = src[i].v, xp = dst[i].u, yp = dst[i].v;
    a.row(2 * i) << x, y, 1, 0, 0, 0, -x * xp, -y * xp;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -x * yp, -y * yp;
    b(2 * i) = xp;
    b(2 * i + 1) = yp;
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(a);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kDegenerateCorners, "corner correspondences are degenerate");
  }
  const Eigen::Matrix<double, 8, 1> h = lu.solve(b);
  Mat3 m;
  m << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
  return Homography(m);
}

Homography sample_perspective(FrameRng& rng, const AugmentConfig& cfg, int side) {
  cfg.validate();
  if (side < 2) throw Error(ErrorCode::kInvalidArgument, "perspective side must be >= 2");
  if (cfg.perspective_scale == 0.0) return Homography();
  const double s = side - 1.0;
  const std::array<Pixel, 4> src = {Pixel{0, 0}, Pixel{s, 0}, Pixel{s, s}, Pixel{0, s}};
  const double max_shift = cfg.perspective_scale * side;
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::array<Pixel, 4> dst{};
    for (int i = 0; i < 4; ++i) {
      dst[i].u = src[i].u + rng.uniform(-max_shift, max_shift);
      dst[i].v = src[i].v + rng.uniform(-max_shift, max_shift);
    }
    if (strictly_convex(dst)) return homography_from_corners(src, dst);
  }
  throw Error(ErrorCode::kDegenerateCorners, "no convex corner draw in 8 attempts");
}

ImageBuf apply_random_overlay(FrameRng& rng, const ImageBuf& img, const AugmentConfig& cfg,
                              std::span<const ImageBuf> pool) {
  cfg.validate();
  if (cfg.overlay_probability > 0.0 && pool.empty()) {
    throw Error(ErrorCode::kEmptyPool, "random overlay enabled with an empty pool");
  }
  if (!(rng.uniform() < cfg.overlay_probability)) return img;
  const ImageBuf& pick = pool[rng.uniform_int(pool.size())];
  return alpha_blend(img, resize_bilinear(pick, img.width(), img.height()), cfg.overlay_alpha);
}

ImageBuf augment_frame(const ImageBuf& img, const AugmentConfig& cfg,
                       std::span<const ImageBuf> pool, std::uint64_t seed,
                       std::string_view traj_id, std::uint64_t frame_idx) {
  if (!cfg.enabled) return img;
  FrameRng overlay_rng = derive_rng(seed, traj_id, frame_idx, "overlay");
  ImageBuf out = apply_random_overlay(overlay_rng, img, cfg, pool);
  FrameRng persp_rng = derive_rng(seed, traj_id, frame_idx, "perspective");
  if (persp_rng.uniform() < cfg.perspective_probability) {
    const int side = std::min(out.width(), out.height());
    out = warp_perspective(out, sample_perspective(persp_rng, cfg, side));
  }
  return out;
}

}  // namespace tcpalign
