#pragma once

#include "turbloc/geometry.hpp"

#include <array>
#include <string_view>
#include <vector>

namespace turbloc {

enum class LineClass : int { Tower = 0, Hub = 1, Blade = 2 };
inline constexpr int kLineClassCount = 3;

/// Point classes share one heatmap channel each; the three blade tips are
/// a single class.
enum class PointClass : int { TowerBase = 0, TowerTop = 1, BladeCentre = 2, BladeTips = 3 };
inline constexpr int kPointClassCount = 4;

/// Indices into TurbineSkeleton::points.
enum SkeletonPoint : int {
  kTowerBase = 0,
  kTowerTop = 1,
  kBladeCentre = 2,
  kBladeTip0 = 3,
  kBladeTip1 = 4,
  kBladeTip2 = 5,
};
inline constexpr int kSkeletonPointCount = 6;
inline constexpr int kSkeletonLineCount = 5;

std::string_view to_string(LineClass c);
std::string_view to_string(PointClass c);
PointClass point_class(int skeleton_point);

struct TurbineParams {
  Vec3 base_position = Vec3::Zero();
  /// Yaw of the rotor-plane normal about +z, radians.
  double heading = 0.0;
  double tower_height = 10.0;
  /// Tower top to blade centre, along the heading direction.
  double hub_offset = 1.0;
  double blade_length = 5.0;
  /// In-plane blade directions, radians, counter-clockwise from the rotor
  /// plane's horizontal axis; 90 deg points straight up.
  std::array<double, 3> blade_azimuths = {1.5707963267948966, 3.6651914291880923,
                                          5.7595865315812871};

  void validate() const;
};

struct SkeletonLine {
  int from;
  int to;
  LineClass cls;
};

struct TurbineSkeleton {
  std::array<Vec3, kSkeletonPointCount> points;
  std::array<SkeletonLine, kSkeletonLineCount> lines;
};

/// World frame is z-up; the rotor plane is vertical with its normal along
/// the heading.
TurbineSkeleton build_skeleton(const TurbineParams& params);

struct LineSample {
  Vec3 position;
  LineClass cls;
  /// Index into TurbineSkeleton::lines. Diagnostics only.
  int line_id;
};

struct SubdividedModel {
  std::vector<LineSample> samples;
};

/// Endpoint-inclusive uniform subdivision of every skeleton line; each
/// count must be at least 2.
SubdividedModel subdivide(const TurbineSkeleton& skeleton, int s_tower,
                          int s_hub, int s_blade);

}  // namespace turbloc
