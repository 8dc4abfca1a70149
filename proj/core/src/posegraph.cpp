#include "turbloc/posegraph.hpp"

#include "turbloc/residuals.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace turbloc {

void GraphWeights::validate() const {
  if (relative_diagonal) {
    if ((relative_diagonal->array() < 0.0).any() || !relative_diagonal->allFinite()) {
      throw std::invalid_argument("relative weights must be finite and >= 0");
    }
  }
  if (!(beta_t >= 0.0 && beta_rot >= 0.0 && beta_p >= 0.0 && beta_line >= 0.0)) {
    throw std::invalid_argument("graph weights must be >= 0");
  }
  if (!(beta_p > 0.0 || beta_line > 0.0)) {
    throw std::invalid_argument("at least one of beta_p, beta_line must be > 0");
  }
  if (!((relative_weights().array() > 0.0).any())) {
    throw std::invalid_argument("at least one relative-pose weight must be > 0");
  }
}

Vec6 GraphWeights::relative_weights() const {
  if (relative_diagonal) return *relative_diagonal;
  Vec6 w;
  w << beta_t, beta_t, beta_t, beta_rot, beta_rot, beta_rot;
  return w;
}

Vec6 GraphWeights::relative_sqrt_weights() const {
  return relative_weights().cwiseSqrt();
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(cost_tolerance > 0.0) || !(step_tolerance > 0.0)) {
    throw std::invalid_argument("solver tolerances must be > 0");
  }
  if (!(damping_floor > 0.0)) throw std::invalid_argument("damping_floor must be > 0");
  if (window < 0) throw std::invalid_argument("window must be >= 0");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (!(coarse_scale >= 1.0)) throw std::invalid_argument("coarse_scale must be >= 1");
}

TrackerSetup TrackerSetup::make(const TurbineParams& turbine,
                                const CameraIntrinsics& camera,
                                const MatchConfig& match,
                                const GraphWeights& weights) {
  camera.validate();
  match.validate();
  weights.validate();
  TrackerSetup setup;
  setup.skeleton = build_skeleton(turbine);
  setup.samples = subdivide(setup.skeleton, match.s_tower, match.s_hub, match.s_blade);
  setup.camera = camera;
  setup.match = match;
  setup.weights = weights;
  return setup;
}

int PoseGraph::add_keyframe(const Pose& measured_pose, FramePtr frame) {
  Keyframe kf;
  kf.id = static_cast<int>(keyframes_.size());
  kf.measured_pose = measured_pose;
  kf.frame = std::move(frame);
  if (keyframes_.empty()) {
    kf.estimate = measured_pose;
  } else {
    const Keyframe& prev = keyframes_.back();
    kf.relative_measurement = relative_pose(measured_pose, prev.measured_pose);
    kf.estimate = next_from_relative(prev.estimate, *kf.relative_measurement);
  }
  keyframes_.push_back(std::move(kf));
  return keyframes_.back().id;
}

std::vector<Pose> PoseGraph::estimates() const {
  std::vector<Pose> out;
  out.reserve(keyframes_.size());
  for (const Keyframe& kf : keyframes_) out.push_back(kf.estimate);
  return out;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::CostConverged: return "cost_converged";
    case Termination::StepConverged: return "step_converged";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::NoProgress: return "no_progress";
    case Termination::RankDeficient: return "rank_deficient";
    case Termination::SolveFailed: return "solve_failed";
  }
  return "?";
}

bool OptimizationReport::ok() const {
  return termination != Termination::RankDeficient &&
         termination != Termination::SolveFailed;
}

namespace {

struct Anchor {
  Vec3 point;
  Vec2 target;
  double sqrt_weight;
  MatchKind kind;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

// The active keyframes [first, n) of a graph, with their correspondences
// frozen between re-matching calls.
class Problem {
 public:
  Problem(const PoseGraph& graph, const TrackerSetup& setup, const MatchConfig& match,
          std::size_t first)
      : graph_(graph), setup_(setup), match_(match), first_(first),
        count_(graph.size() - first), anchors_(count_) {
    rel_sqrt_ = setup.weights.relative_sqrt_weights();
    sqrt_point_ = std::sqrt(setup.weights.beta_p);
    sqrt_line_ = std::sqrt(setup.weights.beta_line);
  }

  std::size_t count() const { return count_; }

  void rematch(const std::vector<Pose>& poses) {
    point_matches_ = 0;
    line_matches_ = 0;
    for (std::size_t j = 0; j < count_; ++j) {
      anchors_[j].clear();
      const Keyframe& kf = graph_.keyframe(first_ + j);
      if (!kf.frame) continue;
      const auto matches = match_frame(setup_.skeleton, setup_.samples, poses[j],
                                       setup_.camera, *kf.frame, match_);
      for (const Correspondence& c : matches) {
        if (c.kind == MatchKind::Point) {
          if (sqrt_point_ == 0.0) continue;
          anchors_[j].push_back({setup_.skeleton.points[c.source], c.matched,
                                 sqrt_point_, c.kind});
          ++point_matches_;
        } else {
          if (sqrt_line_ == 0.0) continue;
          anchors_[j].push_back({setup_.samples.samples[c.source].position, c.matched,
                                 sqrt_line_, c.kind});
          ++line_matches_;
        }
      }
    }
  }

  int point_matches() const { return point_matches_; }
  int line_matches() const { return line_matches_; }

  // Sum of squares on the frozen correspondences; +inf when any matched
  // point falls behind its camera.
  double cost(const std::vector<Pose>& poses) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < count_; ++j) {
      if (const auto* prev = previous(poses, j)) {
        const Keyframe& kf = graph_.keyframe(first_ + j);
        sum += pose_residual(relative_pose(poses[j], *prev), *kf.relative_measurement,
                             rel_sqrt_)
                   .squaredNorm();
      }
      for (const Anchor& a : anchors_[j]) {
        const Vec3 pc = world_to_camera(poses[j], a.point);
        const auto uv = project_camera_point(setup_.camera, pc);
        if (!uv) return std::numeric_limits<double>::infinity();
        sum += a.sqrt_weight * a.sqrt_weight * (*uv - a.target).squaredNorm();
      }
    }
    return sum;
  }

  // Normal equations J^T J and J^T r in 6x6 blocks; lower[j] holds the
  // (j, j-1) block.
  void linearize(const std::vector<Pose>& poses, std::vector<Mat6>& diag,
                 std::vector<Mat6>& lower, Eigen::VectorXd& grad) const {
    diag.assign(count_, Mat6::Zero());
    lower.assign(count_, Mat6::Zero());
    grad.setZero(static_cast<Eigen::Index>(6 * count_));
    for (std::size_t j = 0; j < count_; ++j) {
      auto g_j = grad.segment<6>(static_cast<Eigen::Index>(6 * j));
      if (const auto* prev = previous(poses, j)) {
        const Keyframe& kf = graph_.keyframe(first_ + j);
        const RelativeTerm t =
            relative_residual(poses[j], *prev, *kf.relative_measurement, rel_sqrt_);
        diag[j].noalias() += t.d_current.transpose() * t.d_current;
        g_j.noalias() += t.d_current.transpose() * t.residual;
        if (j > 0) {
          diag[j - 1].noalias() += t.d_previous.transpose() * t.d_previous;
          lower[j].noalias() += t.d_current.transpose() * t.d_previous;
          grad.segment<6>(static_cast<Eigen::Index>(6 * (j - 1))).noalias() +=
              t.d_previous.transpose() * t.residual;
        }
      }
      for (const Anchor& a : anchors_[j]) {
        const auto term = reprojection_residual(poses[j], setup_.camera, a.point,
                                                a.target, a.sqrt_weight);
        if (!term) continue;
        diag[j].noalias() += term->jacobian.transpose() * term->jacobian;
        g_j.noalias() += term->jacobian.transpose() * term->residual;
      }
    }
  }

 private:
  // Predecessor pose of active keyframe j, or nullptr for keyframe 0.
  const Pose* previous(const std::vector<Pose>& poses, std::size_t j) const {
    const std::size_t i = first_ + j;
    if (i == 0) return nullptr;
    if (j > 0) return &poses[j - 1];
    return &graph_.keyframe(i - 1).estimate;
  }

  const PoseGraph& graph_;
  const TrackerSetup& setup_;
  const MatchConfig& match_;
  std::size_t first_;
  std::size_t count_;
  std::vector<std::vector<Anchor>> anchors_;
  Vec6 rel_sqrt_;
  double sqrt_point_ = 0.0;
  double sqrt_line_ = 0.0;
  int point_matches_ = 0;
  int line_matches_ = 0;
};

SparseMatrix assemble(const std::vector<Mat6>& diag, const std::vector<Mat6>& lower,
                      const Eigen::VectorXd& damping) {
  const Eigen::Index n = static_cast<Eigen::Index>(6 * diag.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(diag.size() * 21 + lower.size() * 36);
  for (std::size_t j = 0; j < diag.size(); ++j) {
    const Eigen::Index o = static_cast<Eigen::Index>(6 * j);
    for (int c = 0; c < 6; ++c) {
      for (int r = c; r < 6; ++r) {
        double v = diag[j](r, c);
        if (r == c) v += damping(o + r);
        triplets.emplace_back(o + r, o + c, v);
      }
    }
    if (j > 0) {
      for (int c = 0; c < 6; ++c) {
        for (int r = 0; r < 6; ++r) {
          triplets.emplace_back(o + r, o - 6 + c, lower[j](r, c));
        }
      }
    }
  }
  SparseMatrix h(n, n);
  h.setFromTriplets(triplets.begin(), triplets.end());
  return h;
}

using Solver = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower>;

bool gauge_fixed(const std::vector<Mat6>& diag, const std::vector<Mat6>& lower) {
  const SparseMatrix h =
      assemble(diag, lower, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(6 * diag.size())));
  Solver ldlt(h);
  if (ldlt.info() != Eigen::Success) return false;
  const Eigen::VectorXd d = ldlt.vectorD();
  const double largest = d.cwiseAbs().maxCoeff();
  return largest > 0.0 && d.minCoeff() > 1e-12 * largest;
}

}  // namespace

CostBreakdown total_cost(const PoseGraph& graph, const TrackerSetup& setup) {
  CostBreakdown out;
  out.per_keyframe.resize(graph.size());
  const Vec6 rel_sqrt = setup.weights.relative_sqrt_weights();
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const Keyframe& kf = graph.keyframe(i);
    KeyframeCost& c = out.per_keyframe[i];
    if (i > 0) {
      c.relative = pose_residual(relative_pose(kf.estimate, graph.keyframe(i - 1).estimate),
                                 *kf.relative_measurement, rel_sqrt)
                       .squaredNorm();
    }
    if (kf.frame) {
      for (const Correspondence& m : match_frame(setup.skeleton, setup.samples, kf.estimate,
                                                 setup.camera, *kf.frame, setup.match)) {
        const double d2 = (m.predicted - m.matched).squaredNorm();
        if (m.kind == MatchKind::Point) {
          c.point += setup.weights.beta_p * d2;
          ++c.point_matches;
        } else {
          c.line += setup.weights.beta_line * d2;
          ++c.line_matches;
        }
      }
    }
    out.relative += c.relative;
    out.point += c.point;
    out.line += c.line;
  }
  out.total = out.relative + out.point + out.line;
  return out;
}

namespace {

// Damped Gauss-Newton over keyframes [first, n) with re-matching under
// `match` every iteration.
OptimizationReport solve(PoseGraph& graph, const TrackerSetup& setup, const MatchConfig& match,
                         const SolverConfig& solver, std::size_t first) {
  OptimizationReport report;
  const std::size_t n = graph.size();
  Problem problem(graph, setup, match, first);
  std::vector<Pose> poses;
  poses.reserve(problem.count());
  for (std::size_t i = first; i < n; ++i) poses.push_back(graph.keyframe(i).estimate);

  std::vector<Mat6> diag;
  std::vector<Mat6> lower;
  Eigen::VectorXd grad;
  Solver ldlt;
  bool pattern_ready = false;
  double lambda = 1e-4;
  // Best state under the re-matched cost. A step that lowers the cost for
  // frozen matches can raise it once matches are refreshed, and the chain
  // may wander for a few iterations before coming back below.
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<Pose> best_poses;
  int since_best = 0;
  const Eigen::Index dim = static_cast<Eigen::Index>(6 * problem.count());

  auto finish = [&](Termination t) {
    report.termination = t;
    if (report.ok()) {
      for (std::size_t j = 0; j < poses.size(); ++j) graph.set_estimate(first + j, poses[j]);
    }
    return report;
  };
  // Poses moved since the last re-match: score them with fresh matches and
  // fall back to the best state if they lost.
  auto finish_moved = [&](Termination t) {
    problem.rematch(poses);
    const double cost = problem.cost(poses);
    if (std::isfinite(cost) && cost <= best_cost) {
      report.final_cost = cost;
    } else {
      poses = best_poses;
      report.final_cost = best_cost;
      problem.rematch(poses);
    }
    report.point_matches = problem.point_matches();
    report.line_matches = problem.line_matches();
    return finish(t);
  };
  auto finish_best = [&](Termination t) {
    poses = best_poses;
    report.final_cost = best_cost;
    problem.rematch(poses);
    report.point_matches = problem.point_matches();
    report.line_matches = problem.line_matches();
    return finish(t);
  };

  for (int iter = 1; iter <= solver.max_iterations; ++iter) {
    problem.rematch(poses);
    report.point_matches = problem.point_matches();
    report.line_matches = problem.line_matches();
    if (problem.point_matches() + problem.line_matches() == 0) {
      // Relative constraints alone leave the trajectory free in the world.
      return finish(Termination::RankDeficient);
    }

    const double cost = problem.cost(poses);
    if (iter == 1) {
      report.initial_cost = cost;
      report.final_cost = cost;
    }
    if (!std::isfinite(cost)) return finish(Termination::SolveFailed);
    const bool improved = best_cost - cost >= solver.cost_tolerance * best_cost;
    if (cost < best_cost) {
      best_cost = cost;
      best_poses = poses;
    }
    since_best = improved ? 0 : since_best + 1;
    if (since_best >= solver.patience) return finish_best(Termination::CostConverged);
    report.iterations = iter;
    if (cost < 1e-24) {
      report.final_cost = cost;
      report.iteration_costs.push_back(cost);
      return finish(Termination::CostConverged);
    }

    problem.linearize(poses, diag, lower, grad);
    if (iter == 1 && !gauge_fixed(diag, lower)) {
      return finish(Termination::RankDeficient);
    }

    bool accepted = false;
    double new_cost = cost;
    double step_size = 0.0;
    std::vector<Pose> trial;
    while (!accepted) {
      Eigen::VectorXd damping(dim);
      for (std::size_t j = 0; j < diag.size(); ++j) {
        for (int r = 0; r < 6; ++r) {
          damping(static_cast<Eigen::Index>(6 * j) + r) =
              std::max(lambda * diag[j](r, r), solver.damping_floor);
        }
      }
      const SparseMatrix h = assemble(diag, lower, damping);
      if (!pattern_ready) {
        ldlt.analyzePattern(h);
        pattern_ready = true;
      }
      ldlt.factorize(h);
      if (ldlt.info() != Eigen::Success) return finish(Termination::SolveFailed);
      const Eigen::VectorXd delta = ldlt.solve(-grad);
      if (ldlt.info() != Eigen::Success || !delta.allFinite()) {
        return finish(Termination::SolveFailed);
      }

      trial = poses;
      for (std::size_t j = 0; j < trial.size(); ++j) {
        trial[j] = pose_boxplus(trial[j], delta.segment<6>(static_cast<Eigen::Index>(6 * j)));
      }
      new_cost = problem.cost(trial);
      step_size = delta.cwiseAbs().maxCoeff();

      if (new_cost <= cost) {
        accepted = true;
        lambda = std::max(lambda * 0.1, 1e-12);
      } else if (step_size < solver.step_tolerance) {
        return finish_best(Termination::StepConverged);
      } else {
        lambda *= 10.0;
        if (lambda > 1e12) return finish_best(Termination::NoProgress);
      }
    }

    poses = std::move(trial);
    report.final_cost = new_cost;
    report.iteration_costs.push_back(new_cost);
    if (step_size < solver.step_tolerance) return finish_moved(Termination::StepConverged);
    if ((cost - new_cost) < solver.cost_tolerance * cost) {
      return finish_moved(Termination::CostConverged);
    }
  }
  return finish_moved(Termination::MaxIterations);
}

}  // namespace

OptimizationReport optimize(PoseGraph& graph, const TrackerSetup& setup,
                            const SolverConfig& solver) {
  solver.validate();
  if (graph.empty()) {
    OptimizationReport report;
    report.termination = Termination::RankDeficient;
    return report;
  }
  const std::size_t n = graph.size();
  const std::size_t first =
      solver.window > 0 && n > static_cast<std::size_t>(solver.window) ? n - solver.window : 0;
  return solve(graph, setup, setup.match, solver, first);
}

OptimizationReport align_newest(PoseGraph& graph, const TrackerSetup& setup,
                                const SolverConfig& solver) {
  solver.validate();
  if (graph.empty()) {
    OptimizationReport report;
    report.termination = Termination::RankDeficient;
    return report;
  }
  MatchConfig wide = setup.match;
  const double s = solver.coarse_scale;
  wide.r_point *= s;
  wide.a_line *= s;
  wide.k_line = static_cast<int>(std::lround((wide.k_line - 1) * s)) + 1;
  return solve(graph, setup, wide, solver, graph.size() - 1);
}

std::vector<OptimizationReport> track_sequence(PoseGraph& graph,
                                               const std::vector<Pose>& measured,
                                               const std::vector<FramePtr>& frames,
                                               const TrackerSetup& setup,
                                               const SolverConfig& solver) {
  if (measured.size() != frames.size()) {
    throw std::invalid_argument("track_sequence: pose and frame counts differ");
  }
  std::vector<OptimizationReport> reports;
  reports.reserve(measured.size());
  for (std::size_t i = 0; i < measured.size(); ++i) {
    graph.add_keyframe(measured[i], frames[i]);
    if (i > 0 && solver.coarse_scale > 1.0) align_newest(graph, setup, solver);
    reports.push_back(optimize(graph, setup, solver));
  }
  return reports;
}

}  // namespace turbloc
