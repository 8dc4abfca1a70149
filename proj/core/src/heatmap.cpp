#include "turbloc/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace turbloc {

Channel channel_for(LineClass c) {
  return static_cast<Channel>(static_cast<int>(c));
}

Channel channel_for(PointClass c) {
  return static_cast<Channel>(kLineClassCount + static_cast<int>(c));
}

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::LineTower: return "line_tower";
    case Channel::LineHub: return "line_hub";
    case Channel::LineBlade: return "line_blade";
    case Channel::PointTowerBase: return "point_tower_base";
    case Channel::PointTowerTop: return "point_tower_top";
    case Channel::PointBladeCentre: return "point_blade_centre";
    case Channel::PointBladeTips: return "point_blade_tips";
  }
  return "?";
}

float HeatmapPlane::max_value() const {
  if (data_.empty()) return 0.0f;
  return *std::max_element(data_.begin(), data_.end());
}

HeatmapFrame::HeatmapFrame(int width, int height)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("frame size must be positive");
  }
  for (auto& p : planes_) p = HeatmapPlane(width, height);
}

bool HeatmapFrame::all_zero() const {
  return std::all_of(planes_.begin(), planes_.end(),
                     [](const HeatmapPlane& p) { return p.max_value() == 0.0f; });
}

namespace {

struct PixelBox {
  int x0, y0, x1, y1;  // inclusive
  bool empty() const { return x0 > x1 || y0 > y1; }
};

PixelBox clip_box(double min_x, double min_y, double max_x, double max_y,
                  double pad, int width, int height) {
  auto lo = [](double v, int limit) {
    return static_cast<int>(std::clamp(std::ceil(v), 0.0, static_cast<double>(limit)));
  };
  auto hi = [](double v, int limit) {
    return static_cast<int>(std::clamp(std::floor(v), -1.0, static_cast<double>(limit)));
  };
  return {lo(min_x - pad, width), lo(min_y - pad, height),
          hi(max_x + pad, width - 1), hi(max_y + pad, height - 1)};
}

// Scaled so the pixel nearest uv holds exactly 1: every point gets the same
// discrete peak, whatever its sub-pixel phase.
void splat_point(HeatmapPlane& plane, const Vec2& uv, double sigma) {
  const double reach = 3.0 * sigma;
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const PixelBox box = clip_box(uv.x(), uv.y(), uv.x(), uv.y(), reach,
                                plane.width(), plane.height());
  const double nx = std::round(uv.x()) - uv.x();
  const double ny = std::round(uv.y()) - uv.y();
  const double d2_peak = nx * nx + ny * ny;
  for (int y = box.y0; y <= box.y1; ++y) {
    for (int x = box.x0; x <= box.x1; ++x) {
      const double d2 = (x - uv.x()) * (x - uv.x()) + (y - uv.y()) * (y - uv.y());
      if (d2 > reach * reach) continue;
      const float v = static_cast<float>(std::exp(-(d2 - d2_peak) * inv));
      float& px = plane.at(x, y);
      px = std::max(px, v);
    }
  }
}

double segment_distance_sq(const Vec2& p, const Vec2& a, const Vec2& ab,
                           double ab_len_sq) {
  double t = ab_len_sq > 0.0 ? (p - a).dot(ab) / ab_len_sq : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).squaredNorm();
}

void splat_segment(HeatmapPlane& plane, const Vec2& a, const Vec2& b,
                   double sigma) {
  const double reach = 3.0 * sigma;
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const PixelBox box =
      clip_box(std::min(a.x(), b.x()), std::min(a.y(), b.y()),
               std::max(a.x(), b.x()), std::max(a.y(), b.y()), reach,
               plane.width(), plane.height());
  if (box.empty()) return;
  const Vec2 ab = b - a;
  const double ab_len_sq = ab.squaredNorm();
  for (int y = box.y0; y <= box.y1; ++y) {
    for (int x = box.x0; x <= box.x1; ++x) {
      const double d2 = segment_distance_sq(Vec2(x, y), a, ab, ab_len_sq);
      if (d2 > reach * reach) continue;
      const float v = static_cast<float>(std::exp(-d2 * inv));
      float& px = plane.at(x, y);
      px = std::max(px, v);
    }
  }
}

void renormalize(HeatmapPlane& plane) {
  const float peak = plane.max_value();
  if (peak <= 0.0f) return;
  for (float& v : plane.data()) v /= peak;
}

}  // namespace

HeatmapFrame render(const TurbineSkeleton& skeleton, const Pose& pose,
                    const CameraIntrinsics& k, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("render sigma must be > 0");
  HeatmapFrame frame(k.width, k.height);

  for (int i = 0; i < kSkeletonPointCount; ++i) {
    if (auto uv = project(pose, k, skeleton.points[i])) {
      splat_point(frame.channel(channel_for(point_class(i))), *uv, sigma);
    }
  }

  for (const SkeletonLine& line : skeleton.lines) {
    const auto seg = project_segment(pose, k, skeleton.points[line.from],
                                     skeleton.points[line.to]);
    if (!seg) continue;
    splat_segment(frame.channel(channel_for(line.cls)), seg->first, seg->second,
                  sigma);
  }

  for (int c = 0; c < kChannelCount; ++c) {
    renormalize(frame.channel(static_cast<Channel>(c)));
  }
  return frame;
}

HeatmapFrame render_priors(const TurbineSkeleton& skeleton,
                           const Pose& noisy_pose, const CameraIntrinsics& k) {
  return render(skeleton, noisy_pose, k, kPriorSigma);
}

}  // namespace turbloc
