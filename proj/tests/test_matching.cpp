#include <turbloc/matching.hpp>
#include <turbloc/simulation.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <random>

using namespace turbloc;

namespace {

// Values drawn from a handful of levels so exact ties are common.
HeatmapPlane quantized_plane(std::mt19937_64& g, int w, int h, int levels) {
  HeatmapPlane p(w, h);
  std::uniform_int_distribution<int> d(0, levels);
  for (float& v : p.data()) v = static_cast<float>(d(g)) / levels;
  return p;
}

MatchConfig pixel_centre_config() {
  MatchConfig c;
  c.subpixel_points = false;
  return c;
}

}  // namespace

TEST(MatchConfig, Validation) {
  MatchConfig c;
  EXPECT_NO_THROW(c.validate());
  c.k_line = 40;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.lambda_point = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.r_point = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.s_hub = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(PointMatch, EqualsBruteForceWithTies) {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> pos(-10.0, 60.0);
  std::uniform_real_distribution<double> rad(0.5, 12.0);
  int matched = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const HeatmapPlane plane = quantized_plane(g, 50, 40, trial % 2 ? 3 : 8);
    MatchConfig cfg = pixel_centre_config();
    cfg.r_point = trial % 10 == 0 ? 3.0 : rad(g);
    // Integer centres put many pixels at exactly equal distance.
    const Vec2 predicted = trial % 3 == 0 ? Vec2(std::round(pos(g)), std::round(pos(g)))
                                          : Vec2(pos(g), pos(g));
    const auto got = match_point(plane, predicted, cfg);
    const auto want = oracle::brute_point(plane, predicted, cfg.r_point, cfg.lambda_point);
    ASSERT_EQ(got.has_value(), want.has_value()) << trial;
    if (!want) continue;
    ++matched;
    EXPECT_EQ(got->peak.x(), want->x) << trial;
    EXPECT_EQ(got->peak.y(), want->y) << trial;
    EXPECT_EQ(got->value, want->value);
    EXPECT_EQ(got->matched, Vec2(want->x, want->y));
  }
  EXPECT_GT(matched, 1000);
}

TEST(PointMatch, RespectsThresholdAndRadius) {
  HeatmapPlane p(20, 20);
  p.at(10, 10) = 0.25f;
  MatchConfig cfg = pixel_centre_config();
  cfg.r_point = 5;
  cfg.lambda_point = 0.25;
  EXPECT_FALSE(match_point(p, Vec2(10, 10), cfg).has_value());  // needs > lambda
  p.at(10, 10) = 0.26f;
  EXPECT_TRUE(match_point(p, Vec2(10, 10), cfg).has_value());
  // Exactly on the circle counts; just beyond does not.
  EXPECT_TRUE(match_point(p, Vec2(15, 10), cfg).has_value());
  EXPECT_FALSE(match_point(p, Vec2(15.001, 10), cfg).has_value());
  // Predicted location outside the image still searches the overlap.
  p.at(3, 0) = 0.5f;
  const auto m = match_point(p, Vec2(3, -4), cfg);
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->peak, Eigen::Vector2i(3, 0));
}

TEST(PointMatch, SubpixelRecoversSampledGaussianCentre) {
  std::mt19937_64 g(22);
  std::uniform_real_distribution<double> u(10.0, 40.0);
  for (int i = 0; i < 50; ++i) {
    const Vec2 c(u(g), u(g));
    HeatmapPlane p(50, 50);
    for (int y = 0; y < 50; ++y) {
      for (int x = 0; x < 50; ++x) {
        p.at(x, y) = static_cast<float>(std::exp(-((x - c.x()) * (x - c.x()) +
                                                   (y - c.y()) * (y - c.y())) / 50.0));
      }
    }
    MatchConfig cfg;
    const auto m = match_point(p, c + Vec2(3.0, -2.0), cfg);
    ASSERT_TRUE(m.has_value());
    // log of a Gaussian is a parabola, so the fit is exact up to float
    // rounding of the samples.
    EXPECT_LT((m->matched - c).norm(), 1e-4);
    EXPECT_EQ(m->peak, Eigen::Vector2i(static_cast<int>(std::lround(c.x())),
                                        static_cast<int>(std::lround(c.y()))));
  }
}

TEST(Perpendicular, CanonicalSign) {
  EXPECT_EQ(*perpendicular_direction(Vec2(0, 0), Vec2(0, 5)), Vec2(1, 0));
  EXPECT_EQ(*perpendicular_direction(Vec2(0, 5), Vec2(0, 0)), Vec2(1, 0));
  EXPECT_EQ(*perpendicular_direction(Vec2(0, 0), Vec2(3, 0)), Vec2(0, 1));
  const Vec2 d = *perpendicular_direction(Vec2(1, 1), Vec2(4, 5));
  EXPECT_NEAR(d.x(), 0.8, 1e-15);
  EXPECT_NEAR(d.y(), -0.6, 1e-15);
  EXPECT_FALSE(perpendicular_direction(Vec2(2, 2), Vec2(2, 2)).has_value());
}

TEST(LineMatch, EqualsBruteForceWithTies) {
  std::mt19937_64 g(23);
  std::uniform_int_distribution<int> ip(-5, 45);
  int matched = 0, off_centre = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const HeatmapPlane plane = quantized_plane(g, 41, 41, trial % 2 ? 2 : 5);
    MatchConfig cfg;
    cfg.a_line = trial % 3 == 0 ? 40.0 : 20.0;
    cfg.k_line = trial % 3 == 0 ? 41 : 11;
    cfg.line_keep_tolerance = trial % 4 == 0 ? 0.0 : 0.01;
    // Axis-aligned searches from integer centres with integer steps read
    // pixel values exactly, so ties in the oracle are ties in the matcher.
    const Vec2 predicted(ip(g), ip(g));
    const Vec2 perp = trial % 2 ? Vec2(1, 0) : Vec2(0, 1);
    const auto got = match_line_sample(plane, predicted, perp, cfg);
    const auto want = oracle::brute_line(plane, predicted, perp, cfg.a_line, cfg.k_line,
                                         cfg.lambda_line, cfg.line_keep_tolerance);
    ASSERT_EQ(got.has_value(), want.has_value()) << trial;
    if (!want) continue;
    ++matched;
    const double step = cfg.a_line / (cfg.k_line - 1);
    EXPECT_EQ(got->offset, want->index * step) << trial;
    EXPECT_EQ(got->value, want->value) << trial;
    EXPECT_LT((got->matched - (predicted + want->index * step * perp)).norm(), 1e-12);
    if (want->index != 0) ++off_centre;
  }
  EXPECT_GT(matched, 1500);
  EXPECT_GT(off_centre, 500);
}

TEST(LineMatch, EqualsBruteForceOnObliqueSearches) {
  std::mt19937_64 g(24);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
  int compared = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    HeatmapPlane plane(41, 41);
    std::uniform_real_distribution<float> val(0.0f, 1.0f);
    for (float& v : plane.data()) v = val(g);
    MatchConfig cfg;
    cfg.a_line = 20;
    cfg.k_line = 21;
    const Vec2 predicted(u(g), u(g));
    const double a = ang(g);
    const Vec2 perp(std::cos(a), std::sin(a));
    const auto got = match_line_sample(plane, predicted, perp, cfg);
    const auto want = oracle::brute_line(plane, predicted, perp, cfg.a_line, cfg.k_line,
                                         cfg.lambda_line, cfg.line_keep_tolerance);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (!want) continue;
    EXPECT_NEAR(got->value, want->value, 1e-9);
    // Away from near-ties, the same sample must win.
    ++compared;
    if (std::abs(got->value - want->value) < 1e-9) {
      EXPECT_NEAR(got->offset, want->index * 1.0, 1e-9) << trial;
    }
  }
  EXPECT_GT(compared, 1000);
}

TEST(LineMatch, KeepsPredictionOnTheRidge) {
  // Two parallel ridges; the prediction sits on the left one, whose
  // sampled value is a hair below the right one's.
  HeatmapPlane p(60, 10);
  for (int y = 0; y < 10; ++y) {
    p.at(20, y) = 0.995f;
    p.at(30, y) = 1.0f;
  }
  MatchConfig cfg;
  auto m = match_line_sample(p, Vec2(20, 5), Vec2(1, 0), cfg);
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->offset, 0.0);
  cfg.line_keep_tolerance = 0.0;
  m = match_line_sample(p, Vec2(20, 5), Vec2(1, 0), cfg);
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->offset, 10.0);
}

TEST(MatchFrame, TruthPoseMatchesItself) {
  const TurbineParams tp;
  const TurbineSkeleton s = build_skeleton(tp);
  const MatchConfig cfg;
  const SubdividedModel model = subdivide(s, cfg.s_tower, cfg.s_hub, cfg.s_blade);
  const CameraIntrinsics k;
  const Trajectory orbit = generate_orbit_trajectory(s, 30.0, 12);
  for (const TimedPose& tp_ : orbit.samples) {
    const HeatmapFrame f = render(s, tp_.pose, k, kMeasurementSigma);
    const auto matches = match_frame(s, model, tp_.pose, k, f, cfg);
    int points = 0, lines = 0;
    MatchKind last = MatchKind::Point;
    for (const Correspondence& c : matches) {
      if (c.kind == MatchKind::Point) {
        EXPECT_EQ(last, MatchKind::Point) << "points come first";
        ++points;
        // Peaks are sampled Gaussians; the fit lands on the projection.
        // Neighbouring features in the same channel (tips) may bend it
        // slightly.
        EXPECT_LT((c.matched - c.predicted).norm(), 0.05);
      } else {
        ++lines;
        EXPECT_EQ(c.matched, c.predicted);
      }
      last = c.kind;
    }
    EXPECT_EQ(points, 6);
    EXPECT_GT(lines, 25);
  }
}

TEST(MatchFrame, ShiftedPoseFindsTheImage) {
  const TurbineSkeleton s = build_skeleton(TurbineParams{});
  const MatchConfig cfg;
  const SubdividedModel model = subdivide(s, cfg.s_tower, cfg.s_hub, cfg.s_blade);
  const CameraIntrinsics k;
  const Pose truth = generate_orbit_trajectory(s, 30.0, 8).samples[1].pose;
  const HeatmapFrame f = render(s, truth, k, kMeasurementSigma);
  // Yaw the camera by 2 degrees: predictions shift ~7 px sideways.
  const Pose off(truth.translation(),
                 truth.rotation() * quaternion_exp(Vec3(0, 0.035, 0)));
  const auto matches = match_frame(s, model, off, k, f, cfg);
  for (const Correspondence& c : matches) {
    if (c.kind != MatchKind::Point) continue;
    const Vec2 true_uv = *project(truth, k, s.points[c.source]);
    EXPECT_LT((c.matched - true_uv).norm(), 0.05) << c.source;
  }
}
