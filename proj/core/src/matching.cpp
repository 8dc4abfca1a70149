#include "turbloc/matching.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace turbloc {

void MatchConfig::validate() const {
  if (!(r_point > 0.0)) throw std::invalid_argument("r_point must be > 0");
  if (!(a_line > 0.0)) throw std::invalid_argument("a_line must be > 0");
  if (k_line < 3 || k_line % 2 == 0) {
    throw std::invalid_argument("k_line must be odd and >= 3");
  }
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open_unit(lambda_point) || !open_unit(lambda_line)) {
    throw std::invalid_argument("match thresholds must lie in (0, 1)");
  }
  if (!(line_keep_tolerance >= 0.0 && line_keep_tolerance < 1.0)) {
    throw std::invalid_argument("line_keep_tolerance must lie in [0, 1)");
  }
  if (s_tower < 2 || s_hub < 2 || s_blade < 2) {
    throw std::invalid_argument("subdivision counts must be >= 2");
  }
}

namespace {

// Vertex of the parabola through (-1, lm), (0, l0), (1, lp) in log space.
// Exact for a sampled Gaussian.
double log_parabola_offset(float minus, float centre, float plus) {
  if (!(minus > 0.0f && centre > 0.0f && plus > 0.0f)) return 0.0;
  const double lm = std::log(static_cast<double>(minus));
  const double l0 = std::log(static_cast<double>(centre));
  const double lp = std::log(static_cast<double>(plus));
  const double curvature = lm - 2.0 * l0 + lp;
  if (!(curvature < 0.0)) return 0.0;
  return std::clamp(0.5 * (lm - lp) / curvature, -0.5, 0.5);
}

Vec2 refine_peak(const HeatmapPlane& plane, const Eigen::Vector2i& peak) {
  const int x = peak.x();
  const int y = peak.y();
  const float c = plane.at(x, y);
  Vec2 out(x, y);
  if (plane.in_bounds(x - 1, y) && plane.in_bounds(x + 1, y)) {
    out.x() += log_parabola_offset(plane.at(x - 1, y), c, plane.at(x + 1, y));
  }
  if (plane.in_bounds(x, y - 1) && plane.in_bounds(x, y + 1)) {
    out.y() += log_parabola_offset(plane.at(x, y - 1), c, plane.at(x, y + 1));
  }
  return out;
}

}  // namespace

std::optional<PointMatch> match_point(const HeatmapPlane& channel,
                                      const Vec2& predicted,
                                      const MatchConfig& cfg) {
  const double r = cfg.r_point;
  const double r2 = r * r;
  const double px = predicted.x();
  const double py = predicted.y();
  const int y0 = std::max(0, static_cast<int>(std::ceil(py - r)));
  const int y1 = std::min(channel.height() - 1, static_cast<int>(std::floor(py + r)));
  auto inside = [&](int x, double dy2) { return (x - px) * (x - px) + dy2 <= r2; };

  bool found = false;
  float best = 0.0f;
  double best_d2 = 0.0;
  Eigen::Vector2i best_px(0, 0);
  const float* data = channel.data().data();
  for (int y = y0; y <= y1; ++y) {
    const double dy2 = (y - py) * (y - py);
    if (dy2 > r2) continue;
    // Row span of the disc, nudged so the exact d2 <= r2 test decides the ends.
    const double half = std::sqrt(r2 - dy2);
    int xa = static_cast<int>(std::ceil(px - half));
    int xb = static_cast<int>(std::floor(px + half));
    while (xa <= xb && !inside(xa, dy2)) ++xa;
    while (inside(xa - 1, dy2)) --xa;
    while (xb >= xa && !inside(xb, dy2)) --xb;
    while (inside(xb + 1, dy2)) ++xb;
    xa = std::max(xa, 0);
    xb = std::min(xb, channel.width() - 1);
    const float* row = data + static_cast<std::size_t>(y) * channel.width();
    for (int x = xa; x <= xb; ++x) {
      const float v = row[x];
      if (found && v < best) continue;
      const double d2 = (x - px) * (x - px) + dy2;
      if (!found || v > best || d2 < best_d2) {
        found = true;
        best = v;
        best_d2 = d2;
        best_px = {x, y};
      }
    }
  }
  if (!found || !(best > cfg.lambda_point)) return std::nullopt;

  Vec2 matched = best_px.cast<double>();
  if (cfg.subpixel_points) {
    const Vec2 refined = refine_peak(channel, best_px);
    if ((refined - predicted).squaredNorm() <= r2) matched = refined;
  }
  return PointMatch{matched, best_px, best};
}

std::optional<Vec2> perpendicular_direction(const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double n = d.norm();
  if (!(n > 1e-9)) return std::nullopt;
  Vec2 perp(-d.y() / n, d.x() / n);
  if (perp.x() < 0.0 || (perp.x() == 0.0 && perp.y() < 0.0)) perp = -perp;
  return perp;
}

std::optional<LineMatch> match_line_sample(const HeatmapPlane& channel,
                                           const Vec2& predicted,
                                           const Vec2& perp,
                                           const MatchConfig& cfg) {
  const double step = cfg.a_line / (cfg.k_line - 1);
  const int half = (cfg.k_line - 1) / 2;
  std::optional<double> centre;
  bool found = false;
  LineMatch best{predicted, 0.0, 0.0};
  // Offsets visited as 0, -1, +1, -2, +2, ... so a strict > keeps the
  // preferred sample among exact ties.
  for (int i = 0; i <= 2 * half; ++i) {
    const int j = (i % 2 == 1) ? -(i + 1) / 2 : i / 2;
    const double offset = j * step;
    const Vec2 p = predicted + offset * perp;
    const auto v = channel.bilinear(p);
    if (!v) continue;
    if (j == 0) centre = v;
    if (!found || *v > best.value) {
      found = true;
      best = {p, offset, *v};
    }
  }
  if (!found || !(best.value > cfg.lambda_line)) return std::nullopt;
  if (centre && *centre >= best.value - cfg.line_keep_tolerance) {
    return LineMatch{predicted, 0.0, *centre};
  }
  return best;
}

std::vector<Correspondence> match_frame(const TurbineSkeleton& skeleton,
                                        const SubdividedModel& subdivided,
                                        const Pose& pose_estimate,
                                        const CameraIntrinsics& k,
                                        const HeatmapFrame& frame,
                                        const MatchConfig& cfg) {
  std::vector<Correspondence> out;
  out.reserve(kSkeletonPointCount + subdivided.samples.size());

  for (int i = 0; i < kSkeletonPointCount; ++i) {
    const auto uv = project(pose_estimate, k, skeleton.points[i]);
    if (!uv) continue;
    const Channel ch = channel_for(point_class(i));
    if (const auto m = match_point(frame.channel(ch), *uv, cfg)) {
      out.push_back({*uv, m->matched, MatchKind::Point, ch, i});
    }
  }

  std::array<std::optional<Vec2>, kSkeletonLineCount> perps;
  for (int id = 0; id < kSkeletonLineCount; ++id) {
    const SkeletonLine& line = skeleton.lines[id];
    if (const auto seg = project_segment(pose_estimate, k, skeleton.points[line.from],
                                         skeleton.points[line.to])) {
      perps[id] = perpendicular_direction(seg->first, seg->second);
    }
  }

  for (std::size_t s = 0; s < subdivided.samples.size(); ++s) {
    const LineSample& sample = subdivided.samples[s];
    const auto& perp = perps[sample.line_id];
    if (!perp) continue;
    const auto uv = project(pose_estimate, k, sample.position);
    if (!uv) continue;
    const Channel ch = channel_for(sample.cls);
    if (const auto m = match_line_sample(frame.channel(ch), *uv, *perp, cfg)) {
      out.push_back({*uv, m->matched, MatchKind::Line, ch, static_cast<int>(s)});
    }
  }
  return out;
}

}  // namespace turbloc
