#include <turbloc/turbine_model.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace turbloc;

constexpr double kPi = std::numbers::pi;

TEST(Skeleton, DefaultGeometry) {
  const TurbineSkeleton s = build_skeleton(TurbineParams{});
  EXPECT_LT((s.points[kTowerBase] - Vec3(0, 0, 0)).norm(), 1e-12);
  EXPECT_LT((s.points[kTowerTop] - Vec3(0, 0, 10)).norm(), 1e-12);
  EXPECT_LT((s.points[kBladeCentre] - Vec3(1, 0, 10)).norm(), 1e-12);
  // Heading 0: rotor plane is y-z; first blade straight up, the others
  // 120 degrees apart.
  EXPECT_LT((s.points[kBladeTip0] - Vec3(1, 0, 15)).norm(), 1e-12);
  const double h = 5.0 * std::sin(kPi / 3.0);
  EXPECT_LT((s.points[kBladeTip1] - Vec3(1, -h, 7.5)).norm(), 1e-12);
  EXPECT_LT((s.points[kBladeTip2] - Vec3(1, h, 7.5)).norm(), 1e-12);
}

TEST(Skeleton, HeadingAndBaseMoveRigidly) {
  TurbineParams p;
  p.base_position = Vec3(3, -4, 2);
  p.heading = kPi / 2.0;
  const TurbineSkeleton s = build_skeleton(p);
  const TurbineSkeleton ref = build_skeleton(TurbineParams{});
  // Rotating the reference by the heading about z and translating by the
  // base must reproduce every point.
  const Eigen::AngleAxisd yaw(kPi / 2.0, Vec3::UnitZ());
  for (int i = 0; i < kSkeletonPointCount; ++i) {
    EXPECT_LT((s.points[i] - (yaw * ref.points[i] + p.base_position)).norm(), 1e-12) << i;
  }
}

TEST(Skeleton, BladesAreEquallyLongAndInTheRotorPlane) {
  TurbineParams p;
  p.heading = 0.7;
  p.blade_length = 12.0;
  const TurbineSkeleton s = build_skeleton(p);
  const Vec3 normal(std::cos(0.7), std::sin(0.7), 0.0);
  for (int k = 0; k < 3; ++k) {
    const Vec3 d = s.points[kBladeTip0 + k] - s.points[kBladeCentre];
    EXPECT_NEAR(d.norm(), 12.0, 1e-12);
    EXPECT_NEAR(d.dot(normal), 0.0, 1e-12);
  }
}

TEST(Skeleton, LineStructure) {
  const TurbineSkeleton s = build_skeleton(TurbineParams{});
  EXPECT_EQ(s.lines[0].cls, LineClass::Tower);
  EXPECT_EQ(s.lines[0].from, kTowerBase);
  EXPECT_EQ(s.lines[0].to, kTowerTop);
  EXPECT_EQ(s.lines[1].cls, LineClass::Hub);
  EXPECT_EQ(s.lines[1].to, kBladeCentre);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(s.lines[2 + k].cls, LineClass::Blade);
    EXPECT_EQ(s.lines[2 + k].from, kBladeCentre);
    EXPECT_EQ(s.lines[2 + k].to, kBladeTip0 + k);
  }
}

TEST(Skeleton, PointClasses) {
  EXPECT_EQ(point_class(kTowerBase), PointClass::TowerBase);
  EXPECT_EQ(point_class(kTowerTop), PointClass::TowerTop);
  EXPECT_EQ(point_class(kBladeCentre), PointClass::BladeCentre);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(point_class(kBladeTip0 + k), PointClass::BladeTips);
}

TEST(Skeleton, InvalidParameters) {
  TurbineParams p;
  p.tower_height = 0;
  EXPECT_THROW(build_skeleton(p), std::invalid_argument);
  p = {};
  p.blade_length = -1;
  EXPECT_THROW(build_skeleton(p), std::invalid_argument);
  p = {};
  p.blade_azimuths = {0.0, 2 * kPi, 1.0};
  EXPECT_THROW(build_skeleton(p), std::invalid_argument);
}

TEST(Subdivide, CountsEndpointsAndSpacing) {
  const TurbineSkeleton s = build_skeleton(TurbineParams{});
  const SubdividedModel m = subdivide(s, 10, 3, 8);
  ASSERT_EQ(m.samples.size(), 10u + 3u + 3u * 8u);

  // Tower: 10 samples from z = 0 to z = 10, spacing 10/9.
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(m.samples[k].cls, LineClass::Tower);
    EXPECT_EQ(m.samples[k].line_id, 0);
    EXPECT_NEAR(m.samples[k].position.z(), 10.0 * k / 9.0, 1e-12);
  }
  EXPECT_EQ(m.samples[9].position, s.points[kTowerTop]);
  // Hub: midpoint of top and centre.
  EXPECT_LT((m.samples[11].position - Vec3(0.5, 0, 10)).norm(), 1e-12);
  // Each blade starts at the centre and ends exactly at its tip.
  for (int b = 0; b < 3; ++b) {
    const auto& first = m.samples[13 + 8 * b];
    const auto& last = m.samples[13 + 8 * b + 7];
    EXPECT_EQ(first.position, s.points[kBladeCentre]);
    EXPECT_EQ(last.position, s.points[kBladeTip0 + b]);
    EXPECT_EQ(last.line_id, 2 + b);
  }
}

TEST(Subdivide, RejectsCountsBelowTwo) {
  const TurbineSkeleton s = build_skeleton(TurbineParams{});
  EXPECT_THROW(subdivide(s, 1, 3, 8), std::invalid_argument);
  EXPECT_THROW(subdivide(s, 10, 3, 0), std::invalid_argument);
}
