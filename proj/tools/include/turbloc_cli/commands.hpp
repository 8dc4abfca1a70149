#pragma once

#include "turbloc_cli/config.hpp"

#include <turbloc/geometry.hpp>
#include <turbloc/posegraph.hpp>
#include <turbloc/simulation.hpp>

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace turbloc::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,        ///< bad command line
  kExitConfig = 2,       ///< config missing, malformed or invalid
  kExitIo = 3,           ///< input missing or output not writable/verifiable
  kExitMalformed = 4,    ///< trajectory or frame file does not parse
  kExitSolver = 5,       ///< rank deficiency or solver failure
};

class CommandError : public std::runtime_error {
 public:
  CommandError(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

// JSON records -------------------------------------------------------------

nlohmann::json pose_json(const Pose& pose);
nlohmann::json optimization_json(const OptimizationReport& report);
nlohmann::json errors_json(const TrajectoryErrors& errors);

// Commands -----------------------------------------------------------------
//
// Each writes into `out` (created if needed), re-reads what it wrote, and
// throws CommandError on any failure.

/// truth.traj, noisy.traj and frames/frame_NNNNNN.tmbt.
void cmd_simulate(const RunConfig& config, const std::filesystem::path& config_dir,
                  const std::filesystem::path& out);

/// Incremental build-and-optimize over a measured trajectory and its frame
/// directory; writes optimized.traj and report.json. An empty frame
/// directory leaves the graph without a world anchor: report.json is still
/// written and the command fails with kExitSolver.
void cmd_optimize(const RunConfig& config, const std::filesystem::path& trajectory,
                  const std::filesystem::path& frames_dir,
                  const std::filesystem::path& out);

/// sweep.csv over the configured noise grid.
SweepReport cmd_sweep(const RunConfig& config, const std::filesystem::path& config_dir,
                      const std::filesystem::path& out);

/// Per-pose and mean errors of `estimate` against `truth`.
nlohmann::json cmd_evaluate(const std::filesystem::path& estimate,
                            const std::filesystem::path& truth);

/// frame.tmbt plus one 8-bit PGM per channel. `prior` renders at the
/// prior smoothing instead of the measurement smoothing.
void cmd_render(const RunConfig& config, const Pose& pose, bool prior,
                const std::filesystem::path& out);

/// "tx ty tz qw qx qy qz".
Pose parse_pose(const std::string& text);

/// Sorted frame_NNNNNN.tmbt paths; throws unless the numbering is 0..n-1.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

std::string frame_file_name(std::size_t index);

}  // namespace turbloc::cli
