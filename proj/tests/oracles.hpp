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

// Reference implementations for tests. Plain arrays and loops only; nothing
// here calls into the library except the to_* adapters.

#ifndef TCPALIGN_TESTS_ORACLES_HPP_
#define TCPALIGN_TESTS_ORACLES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

#include "tcpalign/geometry.hpp"
#include "tcpalign/imaging.hpp"

namespace oracle {

using M3 = std::array<std::array<double, 3>, 3>;
using V3 = std::array<double, 3>;

/// SplitMix64; deliberately not the library's generator.
class Rng {
 public:
  explicit Rng(std::uint64_t s) : s_(s) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double gauss() {
    const double u1 = 1.0 - uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t s_;
};

inline M3 identity() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

inline M3 mul(const M3& a, const M3& b) {
  M3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline V3 mul(const M3& a, const V3& v) {
  V3 r{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r[i] += a[i][k] * v[k];
  return r;
}

inline M3 transpose(const M3& a) {
  M3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = a[j][i];
  return t;
}

inline V3 add(const V3& a, const V3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline V3 sub(const V3& a, const V3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

inline V3 random_vec(Rng& rng, double half) {
  return {rng.uniform(-half, half), rng.uniform(-half, half), rng.uniform(-half, half)};
}

/// Uniform rotation from a normalized Gaussian quaternion.
inline M3 random_rotation(Rng& rng) {
  double w = rng.gauss(), x = rng.gauss(), y = rng.gauss(), z = rng.gauss();
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n, x /= n, y /= n, z /= n;
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

/// Columns b1, b2, b1 x b2 from the 6D vector (a1 | a2), column-major.
inline M3 gram_schmidt(const std::array<double, 6>& v) {
  V3 a1 = {v[0], v[1], v[2]}, a2 = {v[3], v[4], v[5]};
  const double n1 = std::sqrt(a1[0] * a1[0] + a1[1] * a1[1] + a1[2] * a1[2]);
  V3 b1 = {a1[0] / n1, a1[1] / n1, a1[2] / n1};
  const double d = b1[0] * a2[0] + b1[1] * a2[1] + b1[2] * a2[2];
  V3 u = {a2[0] - d * b1[0], a2[1] - d * b1[1], a2[2] - d * b1[2]};
  const double n2 = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  V3 b2 = {u[0] / n2, u[1] / n2, u[2] / n2};
  V3 b3 = {b1[1] * b2[2] - b1[2] * b2[1], b1[2] * b2[0] - b1[0] * b2[2],
           b1[0] * b2[1] - b1[1] * b2[0]};
  M3 r{};
  for (int i = 0; i < 3; ++i) {
    r[i][0] = b1[i];
    r[i][1] = b2[i];
    r[i][2] = b3[i];
  }
  return r;
}

/// Pinhole projection with camera-in-world (r, t).
inline std::pair<double, double> project(double fx, double fy, double cx, double cy, const M3& r,
                                         const V3& t, const V3& p) {
  const V3 pc = mul(transpose(r), sub(p, t));
  return {fx * pc[0] / pc[2] + cx, fy * pc[1] / pc[2] + cy};
}

/// Round half away from zero.
inline int round_half_away(double v) {
  return static_cast<int>(v < 0 ? -std::floor(-v + 0.5) : std::floor(v + 0.5));
}

/// Per-pixel crop: top-left = round(center) - floor(k/2), black outside.
inline tcpalign::ImageBuf crop(const tcpalign::ImageBuf& img, double cu, double cv, int k) {
  const int x0 = round_half_away(cu) - k / 2;
  const int y0 = round_half_away(cv) - k / 2;
  tcpalign::ImageBuf out(k, k);
  for (int y = 0; y < k; ++y) {
    for (int x = 0; x < k; ++x) {
      const int sx = x0 + x, sy = y0 + y;
      if (sx >= 0 && sy >= 0 && sx < img.width() && sy < img.height()) out.set(x, y, img.at(sx, sy));
    }
  }
  return out;
}

/// Half-pixel-center bilinear resize with edge clamping, per channel.
inline tcpalign::ImageBuf resize(const tcpalign::ImageBuf& img, int w, int h) {
  tcpalign::ImageBuf out(w, h);
  const double sx = static_cast<double>(img.width()) / w;
  const double sy = static_cast<double>(img.height()) / h;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double fx = (x + 0.5) * sx - 0.5, fy = (y + 0.5) * sy - 0.5;
      fx = std::max(0.0, fx);
      fy = std::max(0.0, fy);
      int x0 = std::min(static_cast<int>(fx), img.width() - 1);
      int y0 = std::min(static_cast<int>(fy), img.height() - 1);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const int y1 = std::min(y0 + 1, img.height() - 1);
      const double ax = fx - x0, ay = fy - y0;
      tcpalign::Rgb px;
      for (int c = 0; c < 3; ++c) {
        const double top = img.at(x0, y0)[c] * (1 - ax) + img.at(x1, y0)[c] * ax;
        const double bot = img.at(x0, y1)[c] * (1 - ax) + img.at(x1, y1)[c] * ax;
        const double v = top * (1 - ay) + bot * ay;
        px[c] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
      out.set(x, y, px);
    }
  }
  return out;
}

inline tcpalign::Rot3 to_rot3(const M3& m) {
  tcpalign::Mat3 e;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e(i, j) = m[i][j];
  return tcpalign::Rot3::from_matrix(e, 1e-12);
}

inline double max_abs_diff(const tcpalign::Rot3& r, const M3& m) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d = std::max(d, std::abs(r(i, j) - m[i][j]));
  return d;
}

inline tcpalign::ImageBuf random_image(Rng& rng, int w, int h) {
  tcpalign::ImageBuf img(w, h);
  for (auto& b : img.bytes()) b = static_cast<std::uint8_t>(rng.next() & 0xff);
  return img;
}

}  // namespace oracle

#endif  // TCPALIGN_TESTS_ORACLES_HPP_
