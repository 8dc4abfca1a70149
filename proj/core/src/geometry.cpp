#include "turbloc/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace turbloc {

Quat canonical_quaternion(const Quat& q) {
  const double n = q.norm();
  if (!std::isfinite(n) || n < 1e-300) {
    throw std::invalid_argument("quaternion must be finite and non-zero");
  }
  Quat out(q.coeffs() / n);
  if (out.w() < 0.0) out.coeffs() *= -1.0;
  return out;
}

Quat quaternion_exp(const Vec3& axis_angle) {
  const double theta = axis_angle.norm();
  if (theta < 1e-12) {
    // Second-order accurate and exact at zero.
    return Quat(1.0, 0.5 * axis_angle.x(), 0.5 * axis_angle.y(),
                0.5 * axis_angle.z())
        .normalized();
  }
  const double half = 0.5 * theta;
  const Vec3 v = axis_angle * (std::sin(half) / theta);
  return Quat(std::cos(half), v.x(), v.y(), v.z());
}

double rotation_angle_between(const Quat& a, const Quat& b) {
  const Quat d = a.conjugate() * b;
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

RelativePose relative_pose(const Pose& current, const Pose& previous) {
  const Quat qc_inv = current.rotation().conjugate();
  return {qc_inv * (previous.translation() - current.translation()),
          qc_inv * previous.rotation()};
}

Pose previous_from_relative(const Pose& current, const RelativePose& rel) {
  return {current.translation() + current.rotation() * rel.translation(),
          current.rotation() * rel.rotation()};
}

Pose next_from_relative(const Pose& previous, const RelativePose& rel) {
  const RelativePose inv = rel.inverse();
  return {previous.translation() + previous.rotation() * inv.translation(),
          previous.rotation() * inv.rotation()};
}

Vec6 pose_residual(const RelativePose& estimated, const RelativePose& measured,
                   const Vec6& weights) {
  Quat dq = estimated.rotation() * measured.rotation().conjugate();
  if (dq.w() < 0.0) dq.coeffs() *= -1.0;
  Vec6 r;
  r.head<3>() = estimated.translation() - measured.translation();
  r.tail<3>() = 2.0 * dq.vec();
  return weights.cwiseProduct(r);
}

Quat quaternion_boxplus(const Quat& q, const Vec3& delta) {
  return canonical_quaternion(q * quaternion_exp(delta));
}

Pose pose_boxplus(const Pose& pose, const Vec6& delta) {
  return {pose.translation() + delta.head<3>(),
          quaternion_boxplus(pose.rotation(), delta.tail<3>())};
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw std::invalid_argument("camera focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("camera image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw std::invalid_argument("principal point must lie inside the image");
  }
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx,
       0.0, fy, cy,
       0.0, 0.0, 1.0;
  return k;
}

bool CameraIntrinsics::contains(const Vec2& uv) const {
  return uv.x() >= -0.5 && uv.x() < width - 0.5 && uv.y() >= -0.5 &&
         uv.y() < height - 0.5;
}

Vec3 world_to_camera(const Pose& pose, const Vec3& world_point) {
  return pose.rotation().conjugate() * (world_point - pose.translation());
}

std::optional<Vec2> project_camera_point(const CameraIntrinsics& k,
                                         const Vec3& pc) {
  if (!(pc.z() > kMinDepth)) return std::nullopt;
  return Vec2(k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy);
}

std::optional<Vec2> project(const Pose& pose, const CameraIntrinsics& k,
                            const Vec3& world_point) {
  auto uv = project_camera_point(k, world_to_camera(pose, world_point));
  if (!uv || !k.contains(*uv)) return std::nullopt;
  return uv;
}

std::optional<std::pair<Vec2, Vec2>> project_segment(const Pose& pose,
                                                     const CameraIntrinsics& k,
                                                     const Vec3& a_world,
                                                     const Vec3& b_world) {
  Vec3 a = world_to_camera(pose, a_world);
  Vec3 b = world_to_camera(pose, b_world);
  const double near = 2.0 * kMinDepth;
  const bool a_in = a.z() > near;
  const bool b_in = b.z() > near;
  if (!a_in && !b_in) return std::nullopt;
  if (!a_in || !b_in) {
    const double t = (near - a.z()) / (b.z() - a.z());
    const Vec3 cut = a + t * (b - a);
    (a_in ? b : a) = cut;
  }
  const auto ua = project_camera_point(k, a);
  const auto ub = project_camera_point(k, b);
  if (!ua || !ub) return std::nullopt;
  return std::make_pair(*ua, *ub);
}

}  // namespace turbloc
