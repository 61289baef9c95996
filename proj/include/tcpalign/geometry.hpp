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

#ifndef TCPALIGN_GEOMETRY_HPP_
#define TCPALIGN_GEOMETRY_HPP_

#include <array>
#include <span>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace tcpalign {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Entry-wise tolerance for orthonormality and determinant checks.
inline constexpr double kRotationTolerance = 1e-9;
/// Minimum camera-frame depth (meters) for a projectable point.
inline constexpr double kMinDepth = 1e-6;

/// A proper rotation matrix. Every instance satisfies R^T R = I and
/// det(R) = +1 within kRotationTolerance.
class Rot3 {
 public:
  Rot3() : m_(Mat3::Identity()) {}

  /// Throws kInvalidRotation if `m` is not in SO(3) within `tol`.
  static Rot3 from_matrix(const Mat3& m, double tol = kRotationTolerance);
  /// Accepts `m` if it is in SO(3) within `tol`, then snaps it onto SO(3)
  /// (polar decomposition). Used for values read from text files.
  static Rot3 nearest(const Mat3& m, double tol);
  static Rot3 from_row_major(std::span<const double, 9> v,
                             double tol = kRotationTolerance);
  static Rot3 from_quaternion(const Eigen::Quaterniond& q);
  static Rot3 about_x(double radians);
  static Rot3 about_y(double radians);
  static Rot3 about_z(double radians);

  const Mat3& matrix() const { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }
  Vec3 column(int c) const { return m_.col(c); }
  std::array<double, 9> row_major() const;

  Rot3 transpose() const { return Rot3(m_.transpose()); }
  Rot3 operator*(const Rot3& o) const { return Rot3(m_ * o.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

 private:
  explicit Rot3(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

/// True when `m` is orthonormal with det +1, entry-wise within `tol`.
bool is_rotation(const Mat3& m, double tol = kRotationTolerance);

enum class Frame { kWorld, kCamera, kRobotBase, kTool };

/// Rigid transform mapping coordinates in `child` to coordinates in `frame`.
/// A camera pose is camera-in-world: frame = kWorld, child = kCamera.
struct Pose {
  Rot3 rotation;
  Vec3 translation = Vec3::Zero();
  Frame frame = Frame::kWorld;
  Frame child = Frame::kTool;

  static Pose identity(Frame f) { return Pose{Rot3(), Vec3::Zero(), f, f}; }
  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

/// a ∘ b; requires a.child == b.frame (kFrameMismatch otherwise).
Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& a);

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

/// Pinhole camera: zero-skew intrinsics, camera-in-world pose (OpenCV axes:
/// x right, y down, z forward) and the image size the intrinsics refer to.
struct CameraCalib {
  CameraIntrinsics intrinsics;
  Pose pose = Pose::identity(Frame::kWorld);
  int width = 1;
  int height = 1;

  /// Throws kInvalidCalibration when an invariant is violated.
  void validate() const;
  /// The [R|t] of the projection equation, i.e. invert(pose).
  Pose world_to_camera() const { return invert(pose); }
};

/// Camera-in-world pose looking from `eye` toward `target`; image "up" is as
/// close to `up` as the viewing direction allows.
Pose look_at(const Vec3& eye, const Vec3& target,
             const Vec3& up = Vec3::UnitZ());

/// Point expressed in camera coordinates.
Vec3 to_camera(const CameraCalib& calib, const Vec3& p_world);

/// Throws kNonPositiveDepth if the camera-frame depth is <= kMinDepth.
Pixel project_point(const CameraCalib& calib, const Vec3& p_world);

/// Intersects the back-projected ray of `px` with the horizontal plane
/// z = z_plane. Throws kRayParallelToPlane or kIntersectionBehindCamera.
Vec3 unproject_to_plane(const CameraCalib& calib, const Pixel& px,
                        double z_plane);

/// First two rotation columns, column-major: (R11, R21, R31, R12, R22, R32).
struct Rot6D {
  std::array<double, 6> v{};
};

Rot6D rot_to_6d(const Rot3& r);
/// Gram–Schmidt inverse of rot_to_6d. Throws kDegenerateInput if the first
/// vector is (near) zero or the two vectors are (near) parallel.
Rot3 rot_from_6d(std::span<const double, 6> r);

/// Rotation of `ee_rotation` expressed in the camera frame: R_C^T R_H with
/// R_C the camera-in-world rotation.
Rot3 camera_frame_rotation(const Pose& camera_pose, const Rot3& ee_rotation);

}  // namespace tcpalign

#endif  // TCPALIGN_GEOMETRY_HPP_
