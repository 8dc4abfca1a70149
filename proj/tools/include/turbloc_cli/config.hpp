#pragma once

#include <turbloc/geometry.hpp>
#include <turbloc/heatmap.hpp>
#include <turbloc/matching.hpp>
#include <turbloc/posegraph.hpp>
#include <turbloc/simulation.hpp>
#include <turbloc/turbine_model.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace turbloc::cli {

struct OrbitSpec {
  double radius = 30.0;
  int n_keyframes = 200;
  LookAt look_at = LookAt::BladeCentre;
};

/// Either a trajectory file or a generated orbit.
struct TrajectorySource {
  std::optional<std::filesystem::path> file;
  OrbitSpec orbit;
};

struct RunConfig {
  TurbineParams turbine;
  CameraIntrinsics camera;
  MatchConfig match;
  GraphWeights weights;
  SolverConfig solver;
  double render_sigma = kMeasurementSigma;
  double noise_sigma_t = 0.05;      ///< m
  double noise_sigma_r = 0.0872664625997164788;  ///< rad (5 deg)
  MeasurementDegradation degradation;
  std::vector<double> sweep_sigma_t;  ///< m; empty selects the default grid
  std::vector<double> sweep_sigma_r;  ///< rad
  int jobs = 1;
  std::uint64_t seed = 1;
  TrajectorySource trajectory;
  std::filesystem::path output_dir = "out";

  /// Runs every embedded validate(); throws ConfigError.
  void validate() const;
  std::vector<NoiseCell> noise_grid() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a JSON document. Unknown keys, wrong types and invariant
/// violations throw ConfigError naming the offending key.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Relative trajectory paths resolve against `base` (the config's folder).
Trajectory load_trajectory(const RunConfig& config,
                           const std::filesystem::path& base = {});

}  // namespace turbloc::cli
