#include "turbloc/residuals.hpp"

namespace turbloc {

std::optional<ReprojectionTerm> reprojection_residual(const Pose& pose,
                                                      const CameraIntrinsics& k,
                                                      const Vec3& world_point,
                                                      const Vec2& target,
                                                      double sqrt_weight) {
  const Mat3 rt = pose.rotation_matrix().transpose();
  const Vec3 pc = rt * (world_point - pose.translation());
  if (!(pc.z() > kMinDepth)) return std::nullopt;

  const double iz = 1.0 / pc.z();
  const Vec2 uv(k.fx * pc.x() * iz + k.cx, k.fy * pc.y() * iz + k.cy);

  Eigen::Matrix<double, 2, 3> d_proj;
  d_proj << k.fx * iz, 0.0, -k.fx * pc.x() * iz * iz,
            0.0, k.fy * iz, -k.fy * pc.y() * iz * iz;

  // Camera point under R <- R Exp(dtheta), t <- t + dt:
  //   d pc / d dt = -R^T,  d pc / d dtheta = [pc]x
  ReprojectionTerm term;
  term.residual = sqrt_weight * (uv - target);
  term.jacobian.leftCols<3>() = -sqrt_weight * d_proj * rt;
  term.jacobian.rightCols<3>() = sqrt_weight * d_proj * skew(pc);
  return term;
}

RelativeTerm relative_residual(const Pose& current, const Pose& previous,
                               const RelativePose& measured,
                               const Vec6& sqrt_weights) {
  const Mat3 rc_t = current.rotation_matrix().transpose();
  const Vec3 t_hat = rc_t * (previous.translation() - current.translation());
  const Quat q_hat = current.rotation().conjugate() * previous.rotation();

  Quat e = q_hat * measured.rotation().conjugate();
  if (e.w() < 0.0) e.coeffs() *= -1.0;
  const Mat3 ev_x = skew(e.vec());
  const Mat3 eye = Mat3::Identity();

  RelativeTerm term;
  term.residual.head<3>() = t_hat - measured.translation();
  term.residual.tail<3>() = 2.0 * e.vec();

  term.d_current.setZero();
  term.d_previous.setZero();
  term.d_current.block<3, 3>(0, 0) = -rc_t;
  term.d_current.block<3, 3>(0, 3) = skew(t_hat);
  term.d_previous.block<3, 3>(0, 0) = rc_t;

  // E = q_hat q_m^-1; a current-side increment pre-multiplies E by
  // Exp(-d), a previous-side increment post-multiplies by Exp(R_m d).
  term.d_current.block<3, 3>(3, 3) = -(e.w() * eye - ev_x);
  term.d_previous.block<3, 3>(3, 3) =
      (e.w() * eye + ev_x) * measured.rotation_matrix();

  term.residual = sqrt_weights.cwiseProduct(term.residual);
  term.d_current = sqrt_weights.asDiagonal() * term.d_current;
  term.d_previous = sqrt_weights.asDiagonal() * term.d_previous;
  return term;
}

}  // namespace turbloc
