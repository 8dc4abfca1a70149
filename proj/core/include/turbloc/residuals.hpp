#pragma once

#include "turbloc/geometry.hpp"

#include <optional>

namespace turbloc {

/// Jacobians are taken with respect to the local pose increment
/// (delta_t, delta_theta) applied by pose_boxplus.
struct ReprojectionTerm {
  Vec2 residual;
  Eigen::Matrix<double, 2, 6> jacobian;
};

/// sqrt_weight * (project(pose, X) - target). nullopt when X is behind the
/// camera; image bounds are not checked.
std::optional<ReprojectionTerm> reprojection_residual(const Pose& pose,
                                                      const CameraIntrinsics& k,
                                                      const Vec3& world_point,
                                                      const Vec2& target,
                                                      double sqrt_weight);

struct RelativeTerm {
  Vec6 residual;
  Mat6 d_current;
  Mat6 d_previous;
};

/// pose_residual(relative_pose(current, previous), measured, sqrt_weights)
/// with its Jacobians.
RelativeTerm relative_residual(const Pose& current, const Pose& previous,
                               const RelativePose& measured,
                               const Vec6& sqrt_weights);

}  // namespace turbloc
