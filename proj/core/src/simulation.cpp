#include "turbloc/simulation.hpp"

#include "turbloc/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace turbloc {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;
}  // namespace

void NoiseSpec::validate() const {
  if (!(sigma_t >= 0.0) || !(sigma_r >= 0.0)) {
    throw std::invalid_argument("noise sigmas must be >= 0");
  }
}

Trajectory inject_noise(const Trajectory& truth, const NoiseSpec& spec) {
  spec.validate();
  if (spec.sigma_t == 0.0 && spec.sigma_r == 0.0) return truth;

  Trajectory noisy;
  noisy.samples.reserve(truth.size());
  if (truth.samples.empty()) return noisy;
  noisy.samples.push_back(truth.samples.front());
  for (std::size_t k = 1; k < truth.size(); ++k) {
    Rng rng = Rng::for_stream(spec.seed, k);
    const Vec3 dt(rng.normal(), rng.normal(), rng.normal());
    const double angle = spec.sigma_r * rng.normal();
    const Vec3 axis = rng.unit_vector();

    const RelativePose rel = relative_pose(truth.samples[k].pose, truth.samples[k - 1].pose);
    const RelativePose perturbed(rel.translation() + spec.sigma_t * dt,
                                 rel.rotation() * quaternion_exp(angle * axis));
    noisy.samples.push_back({truth.samples[k].timestamp,
                             next_from_relative(noisy.samples.back().pose, perturbed)});
  }
  return noisy;
}

std::vector<FramePtr> simulate_measurements(const Trajectory& truth,
                                            const TurbineSkeleton& skeleton,
                                            const CameraIntrinsics& k, double sigma) {
  std::vector<FramePtr> frames;
  frames.reserve(truth.size());
  for (const TimedPose& s : truth.samples) {
    frames.push_back(std::make_shared<const HeatmapFrame>(render(skeleton, s.pose, k, sigma)));
  }
  return frames;
}

HeatmapFrame degrade_frame(const HeatmapFrame& frame, const MeasurementDegradation& spec,
                           std::uint64_t stream) {
  if (!spec.enabled()) return frame;
  Rng rng = Rng::for_stream(spec.seed, stream);
  HeatmapFrame out(frame.width(), frame.height());
  for (int c = 0; c < kChannelCount; ++c) {
    const HeatmapPlane& src = frame.channel(static_cast<Channel>(c));
    HeatmapPlane& dst = out.channel(static_cast<Channel>(c));
    const int sx = static_cast<int>(std::lround(spec.peak_jitter * rng.normal()));
    const int sy = static_cast<int>(std::lround(spec.peak_jitter * rng.normal()));
    if (src.max_value() == 0.0f) continue;
    for (int y = 0; y < dst.height(); ++y) {
      for (int x = 0; x < dst.width(); ++x) {
        const int ox = x - sx;
        const int oy = y - sy;
        double v = src.in_bounds(ox, oy) ? src.at(ox, oy) : 0.0;
        if (spec.pixel_sigma > 0.0) v += spec.pixel_sigma * rng.normal();
        dst.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
    const float peak = dst.max_value();
    if (peak > 0.0f) {
      for (float& v : dst.data()) v /= peak;
    }
  }
  return out;
}

TrajectoryErrors evaluate(const Trajectory& estimate, const Trajectory& truth) {
  if (estimate.size() != truth.size()) {
    throw std::invalid_argument("trajectories differ in length");
  }
  TrajectoryErrors e;
  e.translation.reserve(truth.size());
  e.rotation.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const TimedPose& a = estimate.samples[i];
    const TimedPose& b = truth.samples[i];
    if (std::abs(a.timestamp - b.timestamp) > 1e-6 * std::max(1.0, std::abs(b.timestamp))) {
      throw std::invalid_argument("trajectory timestamps do not match at index " +
                                  std::to_string(i));
    }
    e.translation.push_back((a.pose.translation() - b.pose.translation()).norm());
    e.rotation.push_back(rotation_angle_between(a.pose.rotation(), b.pose.rotation()));
  }
  if (!truth.samples.empty()) {
    double st = 0.0;
    double sr = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      st += e.translation[i];
      sr += e.rotation[i];
    }
    e.mean_translation = st / static_cast<double>(truth.size());
    e.mean_rotation = sr / static_cast<double>(truth.size());
  }
  return e;
}

Trajectory generate_orbit_trajectory(const TurbineSkeleton& skeleton, double radius, int n,
                                     LookAt look_at) {
  const Vec3& centre = skeleton.points[kBladeCentre];
  const double blade_length = (skeleton.points[kBladeTip0] - centre).norm();
  if (!(radius > blade_length)) {
    throw std::invalid_argument("orbit radius must exceed the blade length");
  }
  if (n < 2) throw std::invalid_argument("orbit needs at least 2 keyframes");

  Vec3 target = centre;
  if (look_at == LookAt::SkeletonCentroid) {
    target.setZero();
    for (const Vec3& p : skeleton.points) target += p;
    target /= kSkeletonPointCount;
  }

  // Heading of the rotor normal, recovered from the hub direction.
  const Vec3 hub = centre - skeleton.points[kTowerTop];
  const double heading = hub.head<2>().norm() > 1e-9 ? std::atan2(hub.y(), hub.x()) : 0.0;

  Trajectory out;
  out.samples.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double phi = heading + 2.0 * std::numbers::pi * k / n;
    const Vec3 position = centre + radius * Vec3(std::cos(phi), std::sin(phi), 0.0);
    const Vec3 forward = (target - position).normalized();
    Vec3 right = forward.cross(Vec3::UnitZ());
    if (right.norm() < 1e-9) right = Vec3::UnitX();
    right.normalize();
    const Vec3 down = forward.cross(right);
    Mat3 r;
    r.col(0) = right;
    r.col(1) = down;
    r.col(2) = forward;
    out.samples.push_back({static_cast<double>(k), Pose(position, Quat(r))});
  }
  return out;
}

std::vector<NoiseCell> default_noise_grid() {
  std::vector<NoiseCell> grid;
  for (int i = 1; i <= 10; ++i) {
    for (int j = 1; j <= 10; ++j) {
      grid.push_back({0.01 * i, j * kDegToRad});
    }
  }
  return grid;
}

std::string SweepRow::status() const {
  return failures == 0 ? "ok" : "failures:" + std::to_string(failures);
}

SweepRow run_cell(const Trajectory& truth, const std::vector<FramePtr>& frames,
                  const TrackerSetup& setup, const NoiseCell& cell,
                  const SolverConfig& solver, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const Trajectory noisy = inject_noise(truth, {cell.sigma_t, cell.sigma_r, seed});
  PoseGraph graph;
  const auto reports = track_sequence(graph, noisy.poses(), frames, setup, solver);

  Trajectory optimized = truth;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    optimized.samples[i].pose = graph.keyframe(i).estimate;
  }

  SweepRow row;
  row.cell = cell;
  row.errors.pre = evaluate(noisy, truth);
  row.errors.post = evaluate(optimized, truth);
  for (const OptimizationReport& r : reports) {
    row.iterations += r.iterations;
    if (!r.ok()) ++row.failures;
  }
  row.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

SweepReport run_sweep(const Trajectory& truth, const TrackerSetup& setup,
                      const std::vector<NoiseCell>& grid, const SolverConfig& solver,
                      const SweepOptions& options) {
  if (grid.empty()) throw std::invalid_argument("noise grid is empty");
  truth.validate();
  std::vector<FramePtr> frames =
      simulate_measurements(truth, setup.skeleton, setup.camera, options.render_sigma);
  if (options.degradation.enabled()) {
    for (std::size_t i = 0; i < frames.size(); ++i) {
      frames[i] = std::make_shared<const HeatmapFrame>(
          degrade_frame(*frames[i], options.degradation, i));
    }
  }

  SweepReport report;
  report.rows.resize(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      report.rows[i] = run_cell(truth, frames, setup, grid[i], solver, options.seed);
    }
  };
  const int jobs = std::clamp(options.jobs, 1, static_cast<int>(grid.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return report;
}

void write_sweep_csv(const SweepReport& report, std::ostream& out) {
  out << "sigma_t,sigma_r_deg,pre_t_err,post_t_err,pre_r_err_deg,post_r_err_deg,"
         "iterations,status\n";
  char line[512];
  for (const SweepRow& r : report.rows) {
    std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%s\n",
                  r.cell.sigma_t, r.cell.sigma_r * kRadToDeg,
                  r.errors.pre.mean_translation, r.errors.post.mean_translation,
                  r.errors.pre.mean_rotation * kRadToDeg,
                  r.errors.post.mean_rotation * kRadToDeg, r.iterations,
                  r.status().c_str());
    out << line;
  }
}

}  // namespace turbloc
