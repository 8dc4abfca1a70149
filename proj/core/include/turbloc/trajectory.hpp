#pragma once

#include "turbloc/geometry.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace turbloc {

struct TimedPose {
  double timestamp;
  Pose pose;
};

/// Ordered poses with strictly increasing timestamps.
struct Trajectory {
  std::vector<TimedPose> samples;

  std::size_t size() const { return samples.size(); }
  std::vector<Pose> poses() const;

  /// Throws std::invalid_argument unless there are >= 2 samples with
  /// strictly increasing timestamps.
  void validate() const;
};

class TrajectoryFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One record per line: "timestamp tx ty tz qw qx qy qz", 9 significant
/// digits, '#' starts a comment line.
void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);
Trajectory read_trajectory(const std::filesystem::path& path);

}  // namespace turbloc
