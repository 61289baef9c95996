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

#ifndef TCPALIGN_IMAGING_HPP_
#define TCPALIGN_IMAGING_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tcpalign/geometry.hpp"

namespace tcpalign {

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB image, row-major, top-left origin, interleaved channels.
class ImageBuf {
 public:
  ImageBuf(int width, int height, Rgb fill = {0, 0, 0});
  ImageBuf(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  static constexpr int channels() { return 3; }

  std::uint8_t* pixel(int x, int y) { return data_.data() + index(x, y); }
  const std::uint8_t* pixel(int x, int y) const { return data_.data() + index(x, y); }
  std::uint8_t* row(int y) { return data_.data() + index(0, y); }
  const std::uint8_t* row(int y) const { return data_.data() + index(0, y); }
  Rgb at(int x, int y) const {
    const auto* p = pixel(x, y);
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) {
    auto* p = pixel(x, y);
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }
  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<const std::uint8_t> bytes() const { return data_; }
  std::span<std::uint8_t> bytes() { return data_; }

  friend bool operator==(const ImageBuf&, const ImageBuf&) = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

/// Single-channel binary mask; nonzero bytes are "set".
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Mask(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}
  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// Square crop of side `kappa`; out-of-image regions are filled black.
struct CropSpec {
  int kappa = 200;

  /// Throws kInvalidArgument unless kappa >= 8.
  explicit CropSpec(int k);
};

struct OverlaySpec {
  double axis_length = 0.06;  // meters
  int line_width = 3;         // pixels

  void validate() const;
};

inline constexpr Rgb kAxisColors[3] = {{255, 0, 0}, {0, 255, 0}, {0, 0, 255}};

/// Maps source pixel coordinates to destination pixel coordinates.
class Homography {
 public:
  Homography() : m_(Mat3::Identity()) {}
  /// Normalizes so m(2,2) == 1. Throws kInvalidArgument if that entry is
  /// ~0 or if |det| <= 1e-12 after normalization.
  explicit Homography(const Mat3& m);

  const Mat3& matrix() const { return m_; }
  Pixel apply(const Pixel& p) const;

 private:
  Mat3 m_;
};

struct CropResult {
  ImageBuf image;
  bool clamped = false;
  int origin_x = 0;  // source column of crop pixel (0, 0)
  int origin_y = 0;
};

/// Round half away from zero; the rounding used for crop centers.
int round_pixel(double v);

/// Crop of side spec.kappa whose pixel (kappa/2, kappa/2) is the source pixel
/// at round(center). A center outside the image is clamped to the border and
/// reported through `clamped`. Throws kInvalidArgument if kappa exceeds twice
/// the smaller image side.
CropResult center_crop(const ImageBuf& img, const Pixel& center, const CropSpec& spec);

/// Draws the x/y/z axes of `ee_pose` (red/green/blue, in that order) as
/// projected line segments. Throws kNonPositiveDepth if the EE origin is not in
/// front of the camera; axis tips behind the camera are clipped.
ImageBuf draw_axes_overlay(const ImageBuf& img, const CameraCalib& calib,
                           const Pose& ee_pose, const OverlaySpec& spec);

/// Rasterizes a segment with a square brush; clipped to the image.
void draw_line(ImageBuf& img, const Pixel& a, const Pixel& b, int line_width, Rgb color);

/// Bilinear resize with half-pixel-center alignment. OpenMP over rows.
ImageBuf resize_bilinear(const ImageBuf& img, int out_w, int out_h);

/// Inverse-mapped warp with bilinear sampling, black outside the source.
/// OpenMP over rows.
ImageBuf warp_perspective(const ImageBuf& img, const Homography& h);

/// Per-channel round((1 - alpha) * img + alpha * overlay). OpenMP over rows.
ImageBuf alpha_blend(const ImageBuf& img, const ImageBuf& overlay, double alpha);

/// Luma (BT.601 weights) scaled to [0, 1], row-major.
std::vector<float> to_grayscale(const ImageBuf& img);

/// Single-threaded reference kernels; outputs must match the parallel ones
/// byte for byte.
namespace serial {
ImageBuf resize_bilinear(const ImageBuf& img, int out_w, int out_h);
ImageBuf warp_perspective(const ImageBuf& img, const Homography& h);
ImageBuf alpha_blend(const ImageBuf& img, const ImageBuf& overlay, double alpha);
}  // namespace serial

ImageBuf read_png(const std::filesystem::path& path);
/// Writes an 8-bit RGB PNG with fixed compression settings and no
/// timestamps, so identical buffers produce identical files.
void write_png(const std::filesystem::path& path, const ImageBuf& img);

}  // namespace tcpalign

#endif  // TCPALIGN_IMAGING_HPP_
