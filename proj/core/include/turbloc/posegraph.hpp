#pragma once

#include "turbloc/geometry.hpp"
#include "turbloc/heatmap.hpp"
#include "turbloc/matching.hpp"
#include "turbloc/turbine_model.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace turbloc {

/// Cost weights. The relative-pose block is scaled by sqrt(beta) so the
/// squared cost carries beta itself; likewise for the image terms.
struct GraphWeights {
  double beta_t = 100.0;
  double beta_rot = 400.0;
  double beta_p = 1.0;
  double beta_line = 0.25;
  /// Per-axis relative-pose weights (tx ty tz rx ry rz); replaces
  /// beta_t / beta_rot when set.
  std::optional<Vec6> relative_diagonal;

  void validate() const;
  Vec6 relative_weights() const;
  Vec6 relative_sqrt_weights() const;
};

struct SolverConfig {
  int max_iterations = 100;
  /// Relative cost decrease below which an iteration counts as converged.
  double cost_tolerance = 1e-6;
  /// Max-abs update component below which the solver stops.
  double step_tolerance = 1e-7;
  /// Lower bound on the diagonal damping added to the normal equations.
  double damping_floor = 1e-9;
  /// Optimize only the newest `window` keyframes; 0 means the whole graph.
  int window = 0;
  /// Stop after this many iterations in a row without a new best cost
  /// (measured after re-matching); the best state is returned.
  int patience = 4;
  /// Search-window multiplier for the coarse alignment of each new
  /// keyframe in track_sequence; 1 disables it.
  double coarse_scale = 3.0;

  void validate() const;
};

/// Everything the cost function needs besides the graph itself.
struct TrackerSetup {
  TurbineSkeleton skeleton;
  SubdividedModel samples;
  CameraIntrinsics camera;
  MatchConfig match;
  GraphWeights weights;

  static TrackerSetup make(const TurbineParams& turbine,
                           const CameraIntrinsics& camera,
                           const MatchConfig& match,
                           const GraphWeights& weights);
};

struct Keyframe {
  int id = 0;
  /// GPS/IMU pose; only used to derive relative_measurement.
  Pose measured_pose;
  std::optional<RelativePose> relative_measurement;
  FramePtr frame;
  Pose estimate;
};

/// Chain of keyframes linked by relative-pose measurements. Single writer:
/// add_keyframe and optimize must not run concurrently on one graph.
class PoseGraph {
 public:
  /// Appends a keyframe and returns its id. The estimate starts at the
  /// previous estimate advanced by the new relative measurement (the
  /// measured pose itself for the first keyframe).
  int add_keyframe(const Pose& measured_pose, FramePtr frame);

  std::size_t size() const { return keyframes_.size(); }
  bool empty() const { return keyframes_.empty(); }
  const Keyframe& keyframe(std::size_t id) const { return keyframes_.at(id); }
  const std::vector<Keyframe>& keyframes() const { return keyframes_; }

  void set_estimate(std::size_t id, const Pose& pose) { keyframes_.at(id).estimate = pose; }
  void set_frame(std::size_t id, FramePtr frame) { keyframes_.at(id).frame = std::move(frame); }

  std::vector<Pose> estimates() const;

 private:
  std::vector<Keyframe> keyframes_;
};

struct KeyframeCost {
  /// Relative-pose term linking this keyframe to its predecessor.
  double relative = 0.0;
  double point = 0.0;
  double line = 0.0;
  int point_matches = 0;
  int line_matches = 0;
};

struct CostBreakdown {
  double total = 0.0;
  double relative = 0.0;
  double point = 0.0;
  double line = 0.0;
  std::vector<KeyframeCost> per_keyframe;
};

/// Re-matches every frame at the current estimates and evaluates the
/// sum-of-squares objective.
CostBreakdown total_cost(const PoseGraph& graph, const TrackerSetup& setup);

enum class Termination {
  CostConverged,
  StepConverged,
  MaxIterations,
  NoProgress,
  RankDeficient,
  SolveFailed,
};

std::string_view to_string(Termination t);

struct OptimizationReport {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  Termination termination = Termination::MaxIterations;
  /// Cost after each accepted iteration, on that iteration's matches.
  std::vector<double> iteration_costs;
  int point_matches = 0;
  int line_matches = 0;

  /// False for rank deficiency and solver failures.
  bool ok() const;
};

/// Damped Gauss-Newton over the keyframe estimates. Each outer iteration
/// re-establishes correspondences, linearizes, and takes one accepted
/// damped step.
OptimizationReport optimize(PoseGraph& graph, const TrackerSetup& setup,
                            const SolverConfig& solver);

/// Optimizes only the newest keyframe, with the other estimates held fixed
/// and the search windows widened by solver.coarse_scale. Pulls in a fresh
/// keyframe whose warm start is too far off for the nominal windows.
OptimizationReport align_newest(PoseGraph& graph, const TrackerSetup& setup,
                                const SolverConfig& solver);

/// Adds each (measured pose, frame) in order and optimizes after every
/// addition, warm-starting from the previous solution. With coarse_scale
/// above 1 each new keyframe is first passed through align_newest.
std::vector<OptimizationReport> track_sequence(PoseGraph& graph,
                                               const std::vector<Pose>& measured,
                                               const std::vector<FramePtr>& frames,
                                               const TrackerSetup& setup,
                                               const SolverConfig& solver);

}  // namespace turbloc
