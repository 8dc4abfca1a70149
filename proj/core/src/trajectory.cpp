#include "turbloc/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace turbloc {

std::vector<Pose> Trajectory::poses() const {
  std::vector<Pose> out;
  out.reserve(samples.size());
  for (const TimedPose& s : samples) out.push_back(s.pose);
  return out;
}

void Trajectory::validate() const {
  if (samples.size() < 2) {
    throw std::invalid_argument("trajectory needs at least 2 poses");
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].timestamp > samples[i - 1].timestamp)) {
      throw std::invalid_argument("trajectory timestamps must increase strictly");
    }
  }
}

void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw TrajectoryFormatError("cannot open " + path.string() + " for writing");
  out << "# timestamp tx ty tz qw qx qy qz\n";
  char line[256];
  for (const TimedPose& s : trajectory.samples) {
    const Vec3& t = s.pose.translation();
    const Quat& q = s.pose.rotation();
    std::snprintf(line, sizeof(line), "%.9g %.9g %.9g %.9g %.9g %.9g %.9g %.9g\n",
                  s.timestamp, t.x(), t.y(), t.z(), q.w(), q.x(), q.y(), q.z());
    out << line;
  }
  if (!out) throw TrajectoryFormatError("write failed: " + path.string());
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TrajectoryFormatError("cannot open " + path.string());
  Trajectory trajectory;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double v[8];
    for (double& x : v) {
      if (!(fields >> x) || !std::isfinite(x)) {
        throw TrajectoryFormatError(path.string() + ":" + std::to_string(line_no) +
                                    ": expected 8 numeric fields");
      }
    }
    std::string rest;
    if (fields >> rest) {
      throw TrajectoryFormatError(path.string() + ":" + std::to_string(line_no) +
                                  ": trailing data");
    }
    try {
      trajectory.samples.push_back({v[0], Pose(Vec3(v[1], v[2], v[3]),
                                               Quat(v[4], v[5], v[6], v[7]))});
    } catch (const std::invalid_argument& e) {
      throw TrajectoryFormatError(path.string() + ":" + std::to_string(line_no) + ": " +
                                  e.what());
    }
  }
  return trajectory;
}

}  // namespace turbloc
