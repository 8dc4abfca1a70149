#pragma once

#include "turbloc/geometry.hpp"
#include "turbloc/turbine_model.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace turbloc {

/// Smoothing of the training labels, reused for simulated network output.
inline constexpr double kMeasurementSigma = 5.0;
/// Smoothing of the prior channels rendered from the GPS/IMU pose.
inline constexpr double kPriorSigma = 20.0;

/// Stored plane order: three line classes, then four point classes.
enum class Channel : int {
  LineTower = 0,
  LineHub = 1,
  LineBlade = 2,
  PointTowerBase = 3,
  PointTowerTop = 4,
  PointBladeCentre = 5,
  PointBladeTips = 6,
};
inline constexpr int kChannelCount = 7;

Channel channel_for(LineClass c);
Channel channel_for(PointClass c);
std::string_view channel_name(Channel c);

/// One single-channel float image, row-major, pixel centres at integer
/// coordinates.
class HeatmapPlane {
 public:
  HeatmapPlane() = default;
  HeatmapPlane(int width, int height)
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height, 0.0f) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  float at(int x, int y) const { return data_[index(x, y)]; }
  float& at(int x, int y) { return data_[index(x, y)]; }

  /// Bilinear interpolation; nullopt unless x in [0, w-1] and y in [0, h-1].
  std::optional<double> bilinear(const Vec2& p) const {
    const double x = p.x();
    const double y = p.y();
    if (!(x >= 0.0 && y >= 0.0 && x <= width_ - 1 && y <= height_ - 1)) {
      return std::nullopt;
    }
    const int x0 = std::min(static_cast<int>(x), std::max(width_ - 2, 0));
    const int y0 = std::min(static_cast<int>(y), std::max(height_ - 2, 0));
    const int x1 = std::min(x0 + 1, width_ - 1);
    const int y1 = std::min(y0 + 1, height_ - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1.0 - fx) * at(x0, y0) + fx * at(x1, y0);
    const double bottom = (1.0 - fx) * at(x0, y1) + fx * at(x1, y1);
    return (1.0 - fy) * top + fy * bottom;
  }

  float max_value() const;

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  friend bool operator==(const HeatmapPlane&, const HeatmapPlane&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// Image measurements for one keyframe: line planes I^L followed by point
/// planes I^P, every value in [0, 1].
class HeatmapFrame {
 public:
  HeatmapFrame() = default;
  HeatmapFrame(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  const HeatmapPlane& channel(Channel c) const { return planes_[static_cast<int>(c)]; }
  HeatmapPlane& channel(Channel c) { return planes_[static_cast<int>(c)]; }
  const HeatmapPlane& line(LineClass c) const { return channel(channel_for(c)); }
  const HeatmapPlane& point(PointClass c) const { return channel(channel_for(c)); }

  bool all_zero() const;

  friend bool operator==(const HeatmapFrame&, const HeatmapFrame&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::array<HeatmapPlane, kChannelCount> planes_;
};

using FramePtr = std::shared_ptr<const HeatmapFrame>;

/// Renders the skeleton as seen from `pose`: every in-view point and every
/// (near-plane clipped) line becomes a Gaussian of standard deviation
/// `sigma` pixels in its class channel, truncated at 3 sigma. Features in
/// one channel combine by per-pixel maximum; each non-empty channel is then
/// rescaled so its maximum is exactly 1.
HeatmapFrame render(const TurbineSkeleton& skeleton, const Pose& pose,
                    const CameraIntrinsics& k, double sigma);

HeatmapFrame render_priors(const TurbineSkeleton& skeleton,
                           const Pose& noisy_pose, const CameraIntrinsics& k);

// TMBT frame files -----------------------------------------------------------

class FrameFormatError : public std::runtime_error {
 public:
  enum class Kind { Io, Header, ChannelCount, Truncated };

  FrameFormatError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint32_t kFrameFormatVersion = 1;

/// Little-endian: "TMBT", u32 version, u32 width, u32 height, u32 channel
/// count (7), then the planes in Channel order as row-major f32.
void write_frame(const HeatmapFrame& frame, const std::filesystem::path& path);
HeatmapFrame read_frame(const std::filesystem::path& path);

/// 8-bit binary PGM of one plane (values x255). Debug output only.
void write_plane_pgm(const HeatmapPlane& plane, const std::filesystem::path& path);

}  // namespace turbloc
