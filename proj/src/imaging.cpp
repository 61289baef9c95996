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

#include "tcpalign/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "tcpalign/error.hpp"

namespace tcpalign {

ImageBuf::ImageBuf(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be >= 1");
  }
  data_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill[0];
    data_[i + 1] = fill[1];
    data_[i + 2] = fill[2];
  }
}

ImageBuf::ImageBuf(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be >= 1");
  }
  if (data_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw Error(ErrorCode::kDimensionMismatch, "buffer length != width * height * 3");
  }
}

CropSpec::CropSpec(int k) : kappa(k) {
  if (k < 8) throw Error(ErrorCode::kInvalidArgument, "crop size must be >= 8");
}

void OverlaySpec::validate() const {
  if (!(axis_length > 0.0) || !std::isfinite(axis_length)) {
    throw Error(ErrorCode::kInvalidArgument, "overlay axis length must be > 0");
  }
  if (line_width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "overlay line width must be >= 1");
  }
}

Homography::Homography(const Mat3& m) {
  if (!m.allFinite() || std::abs(m(2, 2)) < 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "homography cannot be normalized");
  }
  m_ = m / m(2, 2);
  if (std::abs(m_.determinant()) <= 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "homography is singular");
  }
}

Pixel Homography::apply(const Pixel& p) const {
  const Eigen::Vector3d q = m_ * Eigen::Vector3d(p.u, p.v, 1.0);
  return Pixel{q.x() / q.z(), q.y() / q.z()};
}

int round_pixel(double v) { return static_cast<int>(std::round(v)); }

CropResult center_crop(const ImageBuf& img, const Pixel& center, const CropSpec& spec) {
  const int k = spec.kappa;
  if (k > 2 * std::min(img.width(), img.height())) {
    throw Error(ErrorCode::kInvalidArgument,
                "crop size " + std::to_string(k) + " exceeds twice the image side");
  }
  if (!std::isfinite(center.u) || !std::isfinite(center.v)) {
    throw Error(ErrorCode::kInvalidArgument, "crop center must be finite");
  }
  // Clamp in double first so huge centers cannot overflow the int cast.
  const double u = std::clamp(center.u, -1.0, static_cast<double>(img.width()));
  const double v = std::clamp(center.v, -1.0, static_cast<double>(img.height()));
  int cu = round_pixel(u);
  int cv = round_pixel(v);
  bool clamped = false;
  if (cu < 0 || cu > img.width() - 1 || cv < 0 || cv > img.height() - 1) {
    clamped = true;
    cu = std::clamp(cu, 0, img.width() - 1);
    cv = std::clamp(cv, 0, img.height() - 1);
  }
  const int x0 = cu - k / 2;
  const int y0 = cv - k / 2;

  ImageBuf out(k, k);
  const int col_lo = std::max(0, -x0);
  const int col_hi = std::min(k, img.width() - x0);
  for (int y = 0; y < k; ++y) {
    const int sy = y0 + y;
    if (sy < 0 || sy >= img.height() || col_lo >= col_hi) continue;
    std::copy(img.pixel(x0 + col_lo, sy), img.pixel(x0 + col_lo, sy) + 3 * (col_hi - col_lo),
              out.pixel(col_lo, y));
  }
  return CropResult{std::move(out), clamped, x0, y0};
}

namespace {

// Liang–Barsky clip of segment a-b against [lo_x, hi_x] x [lo_y, hi_y].
bool clip_segment(Pixel& a, Pixel& b, double lo_x, double hi_x, double lo_y, double hi_y) {
  const double dx = b.u - a.u;
  const double dy = b.v - a.v;
  double t0 = 0.0, t1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.u - lo_x, hi_x - a.u, a.v - lo_y, hi_y - a.v};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  const Pixel start{a.u + t0 * dx, a.v + t0 * dy};
  const Pixel end{a.u + t1 * dx, a.v + t1 * dy};
  a = start;
  b = end;
  return true;
}

void stamp(ImageBuf& img, int x, int y, int line_width, Rgb color) {
  const int lo = (line_width - 1) / 2;
  const int hi = line_width / 2;
  for (int yy = std::max(0, y - lo); yy <= std::min(img.height() - 1, y + hi); ++yy)
    for (int xx = std::max(0, x - lo); xx <= std::min(img.width() - 1, x + hi); ++xx)
      img.set(xx, yy, color);
}

Pixel project_camera_point(const CameraIntrinsics& k, const Vec3& pc) {
  return Pixel{k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy};
}

}  // namespace

void draw_line(ImageBuf& img, const Pixel& from, const Pixel& to, int line_width, Rgb color) {
  Pixel a = from, b = to;
  const double margin = line_width + 1.0;
  if (!clip_segment(a, b, -margin, img.width() - 1 + margin, -margin,
                    img.height() - 1 + margin))
    return;
  int x0 = round_pixel(a.u), y0 = round_pixel(a.v);
  const int x1 = round_pixel(b.u), y1 = round_pixel(b.v);
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    stamp(img, x0, y0, line_width, color);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

ImageBuf draw_axes_overlay(const ImageBuf& img, const CameraCalib& calib,
                           const Pose& ee_pose, const OverlaySpec& spec) {
  spec.validate();
  const Vec3 origin_cam = to_camera(calib, ee_pose.translation);
  if (!(origin_cam.z() > kMinDepth)) {
    throw Error(ErrorCode::kNonPositiveDepth, "end-effector origin behind the camera");
  }
  const double near = std::min(2.0 * kMinDepth, origin_cam.z());
  const Pixel origin_px = project_camera_point(calib.intrinsics, origin_cam);

  ImageBuf out = img;
  for (int axis = 0; axis < 3; ++axis) {
    const Vec3 tip_world = ee_pose.translation + spec.axis_length * ee_pose.rotation.column(axis);
    Vec3 tip_cam = to_camera(calib, tip_world);
    if (tip_cam.z() < near) {
      const double s = (near - origin_cam.z()) / (tip_cam.z() - origin_cam.z());
      tip_cam = origin_cam + s * (tip_cam - origin_cam);
      tip_cam.z() = near;
    }
    draw_line(out, origin_px, project_camera_point(calib.intrinsics, tip_cam),
              spec.line_width, kAxisColors[axis]);
  }
  return out;
}

namespace {

std::uint8_t to_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
}

struct Tap {
  int i0;
  int i1;
  double frac;
};

// Half-pixel-center source coordinate for destination index `d`.
Tap bilinear_tap(int d, double scale, int src_len) {
  double s = (d + 0.5) * scale - 0.5;
  s = std::clamp(s, 0.0, static_cast<double>(src_len - 1));
  const int i0 = static_cast<int>(std::floor(s));
  return Tap{i0, std::min(i0 + 1, src_len - 1), s - i0};
}

double lerp2(double p00, double p01, double p10, double p11, double fx, double fy) {
  return (1.0 - fy) * ((1.0 - fx) * p00 + fx * p01) + fy * ((1.0 - fx) * p10 + fx * p11);
}

// Bilinear sample at continuous (sx, sy); false when outside the source.
bool sample_bilinear(const ImageBuf& img, double sx, double sy, std::uint8_t* dst) {
  if (!(sx >= 0.0 && sy >= 0.0 && sx <= img.width() - 1 && sy <= img.height() - 1)) {
    return false;
  }
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = sx - x0, fy = sy - y0;
  const auto* p00 = img.pixel(x0, y0);
  const auto* p01 = img.pixel(x1, y0);
  const auto* p10 = img.pixel(x0, y1);
  const auto* p11 = img.pixel(x1, y1);
  for (int c = 0; c < 3; ++c) dst[c] = to_u8(lerp2(p00[c], p01[c], p10[c], p11[c], fx, fy));
  return true;
}

void check_resize_args(int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw Error(ErrorCode::kInvalidArgument, "resize target must be >= 1x1");
  }
}

void check_blend_args(const ImageBuf& img, const ImageBuf& overlay, double alpha) {
  if (img.width() != overlay.width() || img.height() != overlay.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "alpha_blend inputs differ in size");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1]");
  }
}

}  // namespace

ImageBuf resize_bilinear(const ImageBuf& img, int out_w, int out_h) {
  check_resize_args(out_w, out_h);
  if (out_w == img.width() && out_h == img.height()) return img;
  const double scale_x = static_cast<double>(img.width()) / out_w;
  const double scale_y = static_cast<double>(img.height()) / out_h;
  std::vector<Tap> xtaps(out_w);
  for (int x = 0; x < out_w; ++x) xtaps[x] = bilinear_tap(x, scale_x, img.width());

  ImageBuf out(out_w, out_h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < out_h; ++y) {
    const Tap ty = bilinear_tap(y, scale_y, img.height());
    const auto* r0 = img.row(ty.i0);
    const auto* r1 = img.row(ty.i1);
    auto* dst = out.row(y);
    for (int x = 0; x < out_w; ++x) {
      const Tap& tx = xtaps[x];
      for (int c = 0; c < 3; ++c) {
        dst[3 * x + c] = to_u8(lerp2(r0[3 * tx.i0 + c], r0[3 * tx.i1 + c], r1[3 * tx.i0 + c],
                                     r1[3 * tx.i1 + c], tx.frac, ty.frac));
      }
    }
  }
  return out;
}

ImageBuf warp_perspective(const ImageBuf& img, const Homography& h) {
  const Mat3 inv = h.matrix().inverse();
  ImageBuf out(img.width(), img.height());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double w = inv(2, 0) * x + inv(2, 1) * y + inv(2, 2);
      if (!(w > 0.0)) continue;
      const double sx = (inv(0, 0) * x + inv(0, 1) * y + inv(0, 2)) / w;
      const double sy = (inv(1, 0) * x + inv(1, 1) * y + inv(1, 2)) / w;
      sample_bilinear(img, sx, sy, out.pixel(x, y));
    }
  }
  return out;
}

ImageBuf alpha_blend(const ImageBuf& img, const ImageBuf& overlay, double alpha) {
  check_blend_args(img, overlay, alpha);
  ImageBuf out(img.width(), img.height());
  const int row_len = img.width() * 3;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height(); ++y) {
    const auto* a = img.row(y);
    const auto* b = overlay.row(y);
    auto* dst = out.row(y);
    for (int i = 0; i < row_len; ++i) dst[i] = to_u8((1.0 - alpha) * a[i] + alpha * b[i]);
  }
  return out;
}

std::vector<float> to_grayscale(const ImageBuf& img) {
  std::vector<float> out(static_cast<std::size_t>(img.width()) * img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto* p = img.pixel(x, y);
      out[static_cast<std::size_t>(y) * img.width() + x] =
          static_cast<float>((0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0);
    }
  }
  return out;
}

namespace serial {

ImageBuf resize_bilinear(const ImageBuf& img, int out_w, int out_h) {
  check_resize_args(out_w, out_h);
  const double scale_x = static_cast<double>(img.width()) / out_w;
  const double scale_y = static_cast<double>(img.height()) / out_h;
  ImageBuf out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const Tap tx = bilinear_tap(x, scale_x, img.width());
      const Tap ty = bilinear_tap(y, scale_y, img.height());
      for (int c = 0; c < 3; ++c) {
        const double v = lerp2(img.pixel(tx.i0, ty.i0)[c], img.pixel(tx.i1, ty.i0)[c],
                               img.pixel(tx.i0, ty.i1)[c], img.pixel(tx.i1, ty.i1)[c],
                               tx.frac, ty.frac);
        out.pixel(x, y)[c] = to_u8(v);
      }
    }
  }
  return out;
}

ImageBuf warp_perspective(const ImageBuf& img, const Homography& h) {
  const Mat3 inv = h.matrix().inverse();
  ImageBuf out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double w = inv(2, 0) * x + inv(2, 1) * y + inv(2, 2);
      if (!(w > 0.0)) continue;
      const double sx = (inv(0, 0) * x + inv(0, 1) * y + inv(0, 2)) / w;
      const double sy = (inv(1, 0) * x + inv(1, 1) * y + inv(1, 2)) / w;
      sample_bilinear(img, sx, sy, out.pixel(x, y));
    }
  }
  return out;
}

ImageBuf alpha_blend(const ImageBuf& img, const ImageBuf& overlay, double alpha) {
  check_blend_args(img, overlay, alpha);
  ImageBuf out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c)
        out.pixel(x, y)[c] =
            to_u8((1.0 - alpha) * img.pixel(x, y)[c] + alpha * overlay.pixel(x, y)[c]);
  return out;
}

}  // namespace serial
}  // namespace tcpalign
