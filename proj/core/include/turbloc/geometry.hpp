#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <optional>
#include <utility>

namespace turbloc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Quat = Eigen::Quaterniond;

/// Camera-frame depth below which a point counts as behind the camera.
inline constexpr double kMinDepth = 1e-6;

/// Normalizes `q` and flips it onto the w >= 0 hemisphere.
/// Throws std::invalid_argument for a zero or non-finite quaternion.
Quat canonical_quaternion(const Quat& q);

/// Hamilton quaternion exponential of an axis-angle vector.
Quat quaternion_exp(const Vec3& axis_angle);

/// Geodesic rotation angle between two orientations, in [0, pi].
double rotation_angle_between(const Quat& a, const Quat& b);

Mat3 skew(const Vec3& v);

namespace detail {
struct AbsoluteFrame {};
struct RelativeFrame {};
}  // namespace detail

/// A rigid transform x -> R x + t stored as translation plus a unit
/// quaternion (Hamilton convention, scalar part kept non-negative).
///
/// The tag separates absolute poses (world-from-camera) from the relative
/// offsets between consecutive keyframes so the two cannot be mixed up.
template <typename Frame>
class RigidTransform {
 public:
  RigidTransform() : t_(Vec3::Zero()), q_(Quat::Identity()) {}
  RigidTransform(const Vec3& t, const Quat& q)
      : t_(t), q_(canonical_quaternion(q)) {}

  static RigidTransform identity() { return {}; }

  const Vec3& translation() const { return t_; }
  const Quat& rotation() const { return q_; }
  Mat3 rotation_matrix() const { return q_.toRotationMatrix(); }

  Mat4 matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation_matrix();
    m.topRightCorner<3, 1>() = t_;
    return m;
  }

  Vec3 apply(const Vec3& p) const { return q_ * p + t_; }

  RigidTransform inverse() const {
    const Quat qi = q_.conjugate();
    return {-(qi * t_), qi};
  }

 private:
  Vec3 t_;
  Quat q_;
};

/// World-from-camera pose of the drone camera.
using Pose = RigidTransform<detail::AbsoluteFrame>;

/// Offset between consecutive keyframes, expressed in the current keyframe:
/// applying it to the current pose reproduces the previous pose.
using RelativePose = RigidTransform<detail::RelativeFrame>;

/// a * b: applies b first, then a.
template <typename Frame>
RigidTransform<Frame> compose(const RigidTransform<Frame>& a,
                              const RigidTransform<Frame>& b) {
  return {a.translation() + a.rotation() * b.translation(),
          a.rotation() * b.rotation()};
}

/// t_rel = R_cur^T (t_prev - t_cur), q_rel = q_cur^-1 * q_prev.
RelativePose relative_pose(const Pose& current, const Pose& previous);

/// current * rel, i.e. the pose `rel` was measured against.
Pose previous_from_relative(const Pose& current, const RelativePose& rel);

/// previous * rel^-1, i.e. the pose a relative measurement predicts for the
/// next keyframe.
Pose next_from_relative(const Pose& previous, const RelativePose& rel);

/// Weighted relative-pose residual
///   C [t_est - t_meas; 2 Vec(q_est * q_meas^-1)]
/// with C = diag(weights). The quaternion product is flipped onto the
/// positive hemisphere before taking its vector part.
Vec6 pose_residual(const RelativePose& estimated, const RelativePose& measured,
                   const Vec6& weights);

/// q * Exp(delta): a local axis-angle increment, renormalized.
Quat quaternion_boxplus(const Quat& q, const Vec3& delta);

/// Translation increment delta.head<3>() and local rotation increment
/// delta.tail<3>().
Pose pose_boxplus(const Pose& pose, const Vec6& delta);

struct CameraIntrinsics {
  double fx = 200.0;
  double fy = 200.0;
  double cx = 127.5;
  double cy = 127.5;
  int width = 256;
  int height = 256;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  Eigen::Matrix3d matrix() const;

  /// Pixel centres sit at integer coordinates; the image covers
  /// [-0.5, width - 0.5) x [-0.5, height - 0.5).
  bool contains(const Vec2& uv) const;
};

Vec3 world_to_camera(const Pose& pose, const Vec3& world_point);

/// Pinhole division only; nullopt when the depth is at or below kMinDepth.
std::optional<Vec2> project_camera_point(const CameraIntrinsics& k,
                                         const Vec3& camera_point);

/// Projects a world point; nullopt when behind the camera or outside the
/// image.
std::optional<Vec2> project(const Pose& pose, const CameraIntrinsics& k,
                            const Vec3& world_point);

/// Projects a world segment after clipping it against the near plane; the
/// endpoints may fall outside the image. nullopt when fully behind.
std::optional<std::pair<Vec2, Vec2>> project_segment(const Pose& pose,
                                                     const CameraIntrinsics& k,
                                                     const Vec3& a,
                                                     const Vec3& b);

}  // namespace turbloc
