#pragma once

#include "turbloc/geometry.hpp"
#include "turbloc/heatmap.hpp"
#include "turbloc/posegraph.hpp"
#include "turbloc/trajectory.hpp"
#include "turbloc/turbine_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace turbloc {

/// Per-step noise of the simulated GPS/IMU relative motion.
struct NoiseSpec {
  double sigma_t = 0.0;  ///< m, per axis
  double sigma_r = 0.0;  ///< rad, rotation angle
  std::uint64_t seed = 0;

  void validate() const;
};

/// Random-walk corruption of a trajectory. Step k's relative offset (as
/// produced by relative_pose) gets a N(0, sigma_t^2 I) translation offset
/// and a rotation by a N(0, sigma_r^2) angle about a uniform axis; the
/// noisy trajectory re-integrates these offsets from the true first pose,
/// so absolute error grows along the flight. Step k draws from RNG stream k.
Trajectory inject_noise(const Trajectory& truth, const NoiseSpec& spec);

/// One rendered frame per pose at `sigma` pixels.
std::vector<FramePtr> simulate_measurements(const Trajectory& truth,
                                            const TurbineSkeleton& skeleton,
                                            const CameraIntrinsics& k,
                                            double sigma = kMeasurementSigma);

/// Optional corruption of simulated frames; disabled when both are zero.
struct MeasurementDegradation {
  double pixel_sigma = 0.0;  ///< additive Gaussian noise on pixel values
  double peak_jitter = 0.0;  ///< px, std of a whole-channel integer shift
  std::uint64_t seed = 0;

  bool enabled() const { return pixel_sigma > 0.0 || peak_jitter > 0.0; }
};

HeatmapFrame degrade_frame(const HeatmapFrame& frame, const MeasurementDegradation& spec,
                           std::uint64_t stream);

struct TrajectoryErrors {
  std::vector<double> translation;  ///< m
  std::vector<double> rotation;     ///< rad, geodesic
  double mean_translation = 0.0;
  double mean_rotation = 0.0;
};

struct ErrorReport {
  TrajectoryErrors pre;
  TrajectoryErrors post;
};

/// Per-pose |t_est - t_true| and geodesic angle of q_est^-1 q_true.
/// Throws std::invalid_argument on length or timestamp mismatch.
TrajectoryErrors evaluate(const Trajectory& estimate, const Trajectory& truth);

enum class LookAt { BladeCentre, SkeletonCentroid };

/// Horizontal circle of `n` poses around the blade centre at its height,
/// starting in front of the rotor, each camera aimed at the look-at target
/// (x right, y down, z forward). Timestamps are 0, 1, 2, ... seconds.
Trajectory generate_orbit_trajectory(const TurbineSkeleton& skeleton, double radius,
                                     int n, LookAt look_at = LookAt::BladeCentre);

struct NoiseCell {
  double sigma_t;  ///< m
  double sigma_r;  ///< rad
};

/// 0.01..0.1 m crossed with 1..10 deg, ten steps each.
std::vector<NoiseCell> default_noise_grid();

struct SweepRow {
  NoiseCell cell;
  ErrorReport errors;
  int iterations = 0;  ///< summed over every incremental optimization
  int failures = 0;    ///< optimizations that were rank deficient or failed
  double seconds = 0.0;  ///< wall time; not part of the CSV
  std::string status() const;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

struct SweepOptions {
  std::uint64_t seed = 1;
  int jobs = 1;
  double render_sigma = kMeasurementSigma;
  MeasurementDegradation degradation;
};

/// Runs one noise cell: noisy relative measurements from inject_noise,
/// frames from the truth, incremental tracking, pre/post evaluation.
SweepRow run_cell(const Trajectory& truth, const std::vector<FramePtr>& frames,
                  const TrackerSetup& setup, const NoiseCell& cell,
                  const SolverConfig& solver, std::uint64_t seed);

/// Every cell shares the seed (common random numbers), so adding cells
/// never changes existing rows. Cells run on `jobs` threads; the report
/// does not depend on scheduling.
SweepReport run_sweep(const Trajectory& truth, const TrackerSetup& setup,
                      const std::vector<NoiseCell>& grid, const SolverConfig& solver,
                      const SweepOptions& options = {});

/// Columns: sigma_t, sigma_r_deg, pre_t_err, post_t_err, pre_r_err_deg,
/// post_r_err_deg, iterations, status.
void write_sweep_csv(const SweepReport& report, std::ostream& out);

}  // namespace turbloc
