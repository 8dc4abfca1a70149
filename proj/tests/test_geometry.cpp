#include <turbloc/geometry.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <numbers>
#include <random>

using namespace turbloc;

namespace {

Pose random_pose(std::mt19937_64& g) {
  return Pose(oracle::random_vec(g, 20.0),
              quaternion_exp(oracle::random_axis_angle(g, std::numbers::pi)));
}

}  // namespace

TEST(Quaternion, CanonicalFormIsUnitWithNonNegativeScalar) {
  const Quat q = canonical_quaternion(Quat(-2.0, 0.0, 0.0, 2.0));
  EXPECT_NEAR(q.norm(), 1.0, 1e-15);
  EXPECT_GE(q.w(), 0.0);
  EXPECT_NEAR(q.w(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(q.z(), -std::sqrt(0.5), 1e-15);
}

TEST(Quaternion, CanonicalRejectsDegenerateInput) {
  EXPECT_THROW(canonical_quaternion(Quat(0, 0, 0, 0)), std::invalid_argument);
  EXPECT_THROW(canonical_quaternion(Quat(NAN, 0, 0, 1)), std::invalid_argument);
}

TEST(Quaternion, ExpMatchesRodrigues) {
  std::mt19937_64 g(7);
  for (int i = 0; i < 200; ++i) {
    const Vec3 v = oracle::random_axis_angle(g, 3.0);
    const Mat3 expected = oracle::rotation(v);
    EXPECT_LT((quaternion_exp(v).toRotationMatrix() - expected).norm(), 1e-12);
  }
  EXPECT_LT((quaternion_exp(Vec3::Zero()).coeffs() - Quat::Identity().coeffs()).norm(), 1e-15);
  // Small angles take the series branch.
  const Vec3 tiny(1e-9, -2e-9, 3e-9);
  EXPECT_LT((quaternion_exp(tiny).toRotationMatrix() - oracle::rotation(tiny)).norm(), 1e-15);
}

TEST(Quaternion, AngleBetweenMatchesMatrixTrace) {
  std::mt19937_64 g(8);
  for (int i = 0; i < 200; ++i) {
    const Quat a = quaternion_exp(oracle::random_axis_angle(g, 3.1));
    const Quat b = quaternion_exp(oracle::random_axis_angle(g, 3.1));
    const Mat3 r = a.toRotationMatrix().transpose() * b.toRotationMatrix();
    EXPECT_NEAR(rotation_angle_between(a, b), oracle::rotation_angle(r), 1e-7);
  }
}

TEST(Quaternion, BoxplusIsRightMultiplication) {
  std::mt19937_64 g(9);
  for (int i = 0; i < 100; ++i) {
    const Quat q = quaternion_exp(oracle::random_axis_angle(g, 3.0));
    const Vec3 d = oracle::random_axis_angle(g, 0.5);
    const Mat3 expected = q.toRotationMatrix() * oracle::rotation(d);
    EXPECT_LT((quaternion_boxplus(q, d).toRotationMatrix() - expected).norm(), 1e-12);
  }
}

TEST(Skew, CrossProduct) {
  const Vec3 a(1, -2, 3), b(0.5, 4, -1);
  EXPECT_LT((skew(a) * b - a.cross(b)).norm(), 1e-15);
}

TEST(RigidTransform, ComposeAndInverseMatchMatrices) {
  std::mt19937_64 g(10);
  for (int i = 0; i < 200; ++i) {
    const Pose a = random_pose(g);
    const Pose b = random_pose(g);
    const Mat4 ma = oracle::homogeneous(a.rotation_matrix(), a.translation());
    const Mat4 mb = oracle::homogeneous(b.rotation_matrix(), b.translation());
    EXPECT_LT((compose(a, b).matrix() - ma * mb).norm(), 1e-10);
    EXPECT_LT((a.inverse().matrix() - ma.inverse()).norm(), 1e-10);
    const Vec3 p = oracle::random_vec(g, 5.0);
    EXPECT_LT((a.apply(p) - (ma * p.homogeneous()).head<3>()).norm(), 1e-10);
  }
}

TEST(RelativePose, MatchesCurrentInverseTimesPrevious) {
  std::mt19937_64 g(11);
  for (int i = 0; i < 200; ++i) {
    const Pose prev = random_pose(g);
    const Pose cur = random_pose(g);
    const RelativePose rel = relative_pose(cur, prev);
    const Mat4 expected = cur.matrix().inverse() * prev.matrix();
    EXPECT_LT((rel.matrix() - expected).norm(), 1e-10);
    EXPECT_LT((previous_from_relative(cur, rel).matrix() - prev.matrix()).norm(), 1e-10);
    EXPECT_LT((next_from_relative(prev, rel).matrix() - cur.matrix()).norm(), 1e-10);
  }
}

TEST(PoseResidual, ZeroAtMeasurementAndSignInvariant) {
  const RelativePose m(Vec3(1, 2, 3), quaternion_exp(Vec3(0.1, -0.2, 0.3)));
  const Vec6 w = Vec6::Constant(2.0);
  EXPECT_LT(pose_residual(m, m, w).norm(), 1e-15);

  // Near pi the raw product can land on w < 0; the hemisphere flip keeps
  // the residual small for nearly equal rotations.
  const RelativePose a(Vec3::Zero(), quaternion_exp(Vec3(0, 0, std::numbers::pi - 1e-3)));
  const RelativePose b(Vec3::Zero(), quaternion_exp(Vec3(0, 0, -std::numbers::pi + 1e-3)));
  EXPECT_LT(pose_residual(a, b, Vec6::Ones()).norm(), 3e-3);
}

TEST(PoseResidual, SmallRotationGivesAxisAngle) {
  const Vec3 d(1e-4, -2e-4, 3e-4);
  const RelativePose est(Vec3(0.5, 0, 0), quaternion_exp(d));
  const RelativePose meas(Vec3::Zero(), Quat::Identity());
  Vec6 w;
  w << 10, 10, 10, 20, 20, 20;
  const Vec6 r = pose_residual(est, meas, w);
  EXPECT_NEAR(r(0), 5.0, 1e-12);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r(3 + i), 20.0 * d(i), 1e-9);
}

TEST(Camera, ValidateRejectsBadIntrinsics) {
  CameraIntrinsics k;
  EXPECT_NO_THROW(k.validate());
  k.fx = 0;
  EXPECT_THROW(k.validate(), std::invalid_argument);
  k = {};
  k.cx = 300;
  EXPECT_THROW(k.validate(), std::invalid_argument);
  k = {};
  k.width = 0;
  EXPECT_THROW(k.validate(), std::invalid_argument);
}

TEST(Camera, ImageBoundsFollowPixelCentres) {
  const CameraIntrinsics k;
  EXPECT_TRUE(k.contains(Vec2(-0.5, -0.5)));
  EXPECT_FALSE(k.contains(Vec2(-0.51, 3)));
  EXPECT_TRUE(k.contains(Vec2(255.49, 255.49)));
  EXPECT_FALSE(k.contains(Vec2(255.5, 3)));
}

TEST(Projection, MatchesPinholeOracle) {
  std::mt19937_64 g(12);
  const CameraIntrinsics k{210.0, 190.0, 120.0, 130.0, 256, 256};
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const Pose pose = random_pose(g);
    const Vec3 x = oracle::random_vec(g, 30.0);
    const auto expected =
        oracle::pinhole(pose.rotation_matrix(), pose.translation(), k.fx, k.fy, k.cx, k.cy, x);
    const auto got = project(pose, k, x);
    if (expected && k.contains(*expected)) {
      ASSERT_TRUE(got.has_value());
      EXPECT_LT((*got - *expected).norm(), 1e-9);
      ++checked;
    } else {
      EXPECT_FALSE(got.has_value());
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(Projection, BehindCameraIsRejected) {
  const CameraIntrinsics k;
  EXPECT_FALSE(project_camera_point(k, Vec3(0, 0, -1)).has_value());
  EXPECT_FALSE(project_camera_point(k, Vec3(0, 0, 0)).has_value());
  const auto uv = project_camera_point(k, Vec3(1, -1, 2));
  ASSERT_TRUE(uv.has_value());
  EXPECT_NEAR(uv->x(), 127.5 + 100.0, 1e-12);
  EXPECT_NEAR(uv->y(), 127.5 - 100.0, 1e-12);
}

TEST(ProjectSegment, ClipsAtNearPlane) {
  const CameraIntrinsics k;
  const Pose identity;
  // Both in front: plain projections, even outside the image.
  auto seg = project_segment(identity, k, Vec3(1, 0, 1), Vec3(-100, 0, 1));
  ASSERT_TRUE(seg.has_value());
  EXPECT_NEAR(seg->first.x(), 327.5, 1e-9);
  EXPECT_NEAR(seg->second.x(), 127.5 - 20000.0, 1e-6);

  EXPECT_FALSE(project_segment(identity, k, Vec3(0, 0, -1), Vec3(1, 0, -2)).has_value());

  // One end behind: the kept end is exact and the cut end continues the
  // image line through it (x/z grows without bound near the plane).
  seg = project_segment(identity, k, Vec3(1, 0, 4), Vec3(1, 0, -4));
  ASSERT_TRUE(seg.has_value());
  EXPECT_NEAR(seg->first.x(), 127.5 + 50.0, 1e-9);
  EXPECT_NEAR(seg->first.y(), 127.5, 1e-9);
  EXPECT_NEAR(seg->second.y(), 127.5, 1e-6);
  EXPECT_GT(seg->second.x(), 1e6);
}
