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

#include "tcpalign/geometry.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "tcpalign/error.hpp"

namespace tcpalign {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kRayParallelToPlane: return "RayParallelToPlane";
    case ErrorCode::kIntersectionBehindCamera: return "IntersectionBehindCamera";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kInvalidRotation: return "InvalidRotation";
    case ErrorCode::kFrameMismatch: return "FrameMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidReference: return "InvalidReference";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kDegenerateCorners: return "DegenerateCorners";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingCamera: return "MissingCamera";
    case ErrorCode::kInvalidCalibration: return "InvalidCalibration";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const Mat3 gram = m.transpose() * m - Mat3::Identity();
  return gram.cwiseAbs().maxCoeff() <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

Rot3 Rot3::from_matrix(const Mat3& m, double tol) {
  if (!is_rotation(m, tol)) {
    std::ostringstream os;
    os << "matrix is not a proper rotation within " << tol;
    throw Error(ErrorCode::kInvalidRotation, os.str());
  }
  return Rot3(m);
}

Rot3 Rot3::nearest(const Mat3& m, double tol) {
  if (!is_rotation(m, tol)) {
    std::ostringstream os;
    os << "matrix is not a proper rotation within " << tol;
    throw Error(ErrorCode::kInvalidRotation, os.str());
  }
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Rot3(svd.matrixU() * svd.matrixV().transpose());
}

Rot3 Rot3::from_row_major(std::span<const double, 9> v, double tol) {
  Mat3 m;
  m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  return from_matrix(m, tol);
}

Rot3 Rot3::from_quaternion(const Eigen::Quaterniond& q) {
  return Rot3(q.normalized().toRotationMatrix());
}

Rot3 Rot3::about_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return Rot3(m);
}

Rot3 Rot3::about_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return Rot3(m);
}

Rot3 Rot3::about_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return Rot3(m);
}

std::array<double, 9> Rot3::row_major() const {
  std::array<double, 9> out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out[3 * r + c] = m_(r, c);
  return out;
}

Pose compose(const Pose& a, const Pose& b) {
  if (a.child != b.frame) {
    throw Error(ErrorCode::kFrameMismatch,
                "compose: left child frame differs from right reference frame");
  }
  return Pose{a.rotation * b.rotation, a.rotation * b.translation + a.translation,
              a.frame, b.child};
}

Pose invert(const Pose& a) {
  const Rot3 rt = a.rotation.transpose();
  return Pose{rt, -(rt * a.translation), a.child, a.frame};
}

void CameraCalib::validate() const {
  const auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidCalibration, msg);
  };
  const auto& k = intrinsics;
  if (!(std::isfinite(k.fx) && std::isfinite(k.fy) && std::isfinite(k.cx) &&
        std::isfinite(k.cy)))
    fail("intrinsics must be finite");
  if (!(k.fx > 0.0 && k.fy > 0.0)) fail("focal lengths must be positive");
  if (width < 1 || height < 1) fail("image size must be at least 1x1");
  if (k.cx < 0.0 || k.cx > width || k.cy < 0.0 || k.cy > height)
    fail("principal point outside the image");
  if (!is_rotation(pose.rotation.matrix())) fail("camera rotation is not in SO(3)");
  if (!pose.translation.allFinite()) fail("camera translation must be finite");
}

Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 z = (target - eye).normalized();
  Vec3 x = z.cross(up);
  if (x.norm() < 1e-9) x = z.cross(Vec3::UnitX());
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 m;
  m.col(0) = x;
  m.col(1) = y;
  m.col(2) = z;
  return Pose{Rot3::from_matrix(m, 1e-12), eye, Frame::kWorld, Frame::kCamera};
}

Vec3 to_camera(const CameraCalib& calib, const Vec3& p_world) {
  return calib.pose.rotation.transpose() * (p_world - calib.pose.translation);
}

Pixel project_point(const CameraCalib& calib, const Vec3& p_world) {
  const Vec3 pc = to_camera(calib, p_world);
  if (!(pc.z() > kMinDepth)) {
    throw Error(ErrorCode::kNonPositiveDepth, "point at or behind the camera plane");
  }
  const auto& k = calib.intrinsics;
  return Pixel{k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy};
}

Vec3 unproject_to_plane(const CameraCalib& calib, const Pixel& px, double z_plane) {
  const auto& k = calib.intrinsics;
  const Vec3 ray_cam((px.u - k.cx) / k.fx, (px.v - k.cy) / k.fy, 1.0);
  const Vec3 ray = calib.pose.rotation * ray_cam;
  const Vec3& origin = calib.pose.translation;
  if (std::abs(ray.normalized().z()) <= 1e-9) {
    throw Error(ErrorCode::kRayParallelToPlane, "viewing ray parallel to the plane");
  }
  // ray_cam has unit z, so `depth` is the camera-frame depth of the hit.
  const double depth = (z_plane - origin.z()) / ray.z();
  if (!(depth > kMinDepth)) {
    throw Error(ErrorCode::kIntersectionBehindCamera, "plane intersection behind the camera");
  }
  Vec3 p = origin + depth * ray;
  p.z() = z_plane;
  return p;
}

Rot6D rot_to_6d(const Rot3& r) {
  return Rot6D{{r(0, 0), r(1, 0), r(2, 0), r(0, 1), r(1, 1), r(2, 1)}};
}

Rot3 rot_from_6d(std::span<const double, 6> r) {
  const Vec3 a1(r[0], r[1], r[2]);
  const Vec3 a2(r[3], r[4], r[5]);
  if (!a1.allFinite() || !a2.allFinite() || a1.norm() <= 1e-9) {
    throw Error(ErrorCode::kDegenerateInput, "first 6D column is zero or non-finite");
  }
  const Vec3 b1 = a1 / a1.norm();
  if (b1.cross(a2).norm() <= 1e-9) {
    throw Error(ErrorCode::kDegenerateInput, "6D columns are parallel");
  }
  const Vec3 b2 = (a2 - a2.dot(b1) * b1).normalized();
  const Vec3 b3 = b1.cross(b2);
  Mat3 m;
  m.col(0) = b1;
  m.col(1) = b2;
  m.col(2) = b3;
  return Rot3::from_matrix(m);
}

Rot3 camera_frame_rotation(const Pose& camera_pose, const Rot3& ee_rotation) {
  return camera_pose.rotation.transpose() * ee_rotation;
}

}  // namespace tcpalign
