#pragma once

#include "turbloc/geometry.hpp"
#include "turbloc/heatmap.hpp"
#include "turbloc/turbine_model.hpp"

#include <optional>
#include <vector>

namespace turbloc {

/// Active-search parameters. Thresholds compare against renormalized
/// heatmap values.
struct MatchConfig {
  double r_point = 30.0;       ///< circular window radius, px
  double lambda_point = 0.3;   ///< minimum accepted point-channel value
  double a_line = 40.0;        ///< perpendicular search length, px
  int k_line = 41;             ///< samples along the search segment (odd)
  double lambda_line = 0.3;    ///< minimum accepted line-channel value
  /// The predicted location stays matched to itself while its value is
  /// within this much of the best sample. Covers the bilinear dip on a
  /// sampled ridge (at most 1/(8 sigma^2), 0.005 at sigma 5) so a
  /// neighbouring ridge of the same class cannot win by it.
  double line_keep_tolerance = 0.01;
  int s_tower = 10;
  int s_hub = 3;
  int s_blade = 8;
  /// Refine the winning pixel of a point search with a separable
  /// log-parabola fit. Off gives literal pixel-centre matches.
  bool subpixel_points = true;

  void validate() const;
};

enum class MatchKind { Point, Line };

struct Correspondence {
  Vec2 predicted;
  Vec2 matched;
  MatchKind kind;
  Channel channel;
  /// Skeleton point index for points, SubdividedModel sample index for lines.
  int source;
};

struct PointMatch {
  Vec2 matched;
  /// Integer pixel that won the disc search.
  Eigen::Vector2i peak;
  float value;
};

/// Maximum over in-bounds pixels whose centres lie within r_point of
/// `predicted`. Ties go to the pixel nearest `predicted`, then to the first
/// in row-major order. nullopt when the maximum does not exceed
/// lambda_point.
std::optional<PointMatch> match_point(const HeatmapPlane& channel,
                                      const Vec2& predicted,
                                      const MatchConfig& cfg);

/// Unit normal of the segment a->b with a canonical sign (x > 0, or
/// x == 0 and y > 0); nullopt for coincident endpoints.
std::optional<Vec2> perpendicular_direction(const Vec2& a, const Vec2& b);

struct LineMatch {
  Vec2 matched;
  double offset;
  double value;
};

/// Evaluates k_line bilinear samples spanning [-a_line/2, a_line/2] along
/// `perp`; returns the best one above lambda_line. Offset 0 wins whenever
/// it is within line_keep_tolerance of the best; otherwise exact ties go
/// to the smallest |offset|, then to the negative side.
std::optional<LineMatch> match_line_sample(const HeatmapPlane& channel,
                                           const Vec2& predicted,
                                           const Vec2& perp,
                                           const MatchConfig& cfg);

/// Establishes every point and line-sample correspondence for one frame at
/// the given pose estimate. Points come first, in skeleton order, then line
/// samples in model order.
std::vector<Correspondence> match_frame(const TurbineSkeleton& skeleton,
                                        const SubdividedModel& subdivided,
                                        const Pose& pose_estimate,
                                        const CameraIntrinsics& k,
                                        const HeatmapFrame& frame,
                                        const MatchConfig& cfg);

}  // namespace turbloc
