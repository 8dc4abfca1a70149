#include "turbloc_cli/commands.hpp"

#include <turbloc/heatmap.hpp>
#include <turbloc/trajectory.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

namespace turbloc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw CommandError(kExitIo, "cannot create directory " + dir.string());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CommandError(kExitIo, "cannot write " + path.string());
    out << text;
    if (!out) throw CommandError(kExitIo, "write failed: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  std::ostringstream back;
  back << in.rdbuf();
  if (back.str() != text) {
    throw CommandError(kExitIo, "verification failed: " + path.string());
  }
}

// Writes and re-reads a trajectory; the text format keeps 9 significant
// digits, so the check is on structure and timestamps.
void save_trajectory(const Trajectory& t, const fs::path& path) {
  try {
    write_trajectory(t, path);
    const Trajectory back = read_trajectory(path);
    if (back.size() != t.size()) throw TrajectoryFormatError("record count differs");
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double a = back.samples[i].timestamp;
      const double b = t.samples[i].timestamp;
      if (std::abs(a - b) > 1e-8 * std::max(1.0, std::abs(b))) {
        throw TrajectoryFormatError("timestamp differs at record " + std::to_string(i));
      }
    }
  } catch (const TrajectoryFormatError& e) {
    throw CommandError(kExitIo, "trajectory output " + path.string() + ": " + e.what());
  }
}

void save_frame(const HeatmapFrame& frame, const fs::path& path) {
  try {
    write_frame(frame, path);
    if (!(read_frame(path) == frame)) {
      throw CommandError(kExitIo, "verification failed: " + path.string());
    }
  } catch (const FrameFormatError& e) {
    throw CommandError(kExitIo, "frame output " + path.string() + ": " + e.what());
  }
}

Trajectory load_input_trajectory(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw CommandError(kExitIo, "trajectory file not found: " + path.string());
  }
  try {
    Trajectory t = read_trajectory(path);
    t.validate();
    return t;
  } catch (const TrajectoryFormatError& e) {
    throw CommandError(kExitMalformed, e.what());
  } catch (const std::invalid_argument& e) {
    throw CommandError(kExitMalformed, path.string() + ": " + e.what());
  }
}

FramePtr load_input_frame(const fs::path& path) {
  try {
    return std::make_shared<const HeatmapFrame>(read_frame(path));
  } catch (const FrameFormatError& e) {
    throw CommandError(e.kind() == FrameFormatError::Kind::Io ? kExitIo : kExitMalformed,
                       e.what());
  }
}

Trajectory source_trajectory(const RunConfig& config, const fs::path& config_dir) {
  try {
    Trajectory t = load_trajectory(config, config_dir);
    t.validate();
    return t;
  } catch (const TrajectoryFormatError& e) {
    throw CommandError(kExitMalformed, e.what());
  } catch (const std::invalid_argument& e) {
    throw CommandError(kExitConfig, std::string("trajectory: ") + e.what());
  }
}

TrackerSetup make_setup(const RunConfig& config) {
  try {
    return TrackerSetup::make(config.turbine, config.camera, config.match, config.weights);
  } catch (const std::invalid_argument& e) {
    throw CommandError(kExitConfig, e.what());
  }
}

}  // namespace

// JSON records -------------------------------------------------------------

json pose_json(const Pose& pose) {
  const Vec3& t = pose.translation();
  const Quat& q = pose.rotation();
  return {{"t", {t.x(), t.y(), t.z()}}, {"q", {q.w(), q.x(), q.y(), q.z()}}};
}

json optimization_json(const OptimizationReport& r) {
  return {{"iterations", r.iterations},
          {"initial_cost", r.initial_cost},
          {"final_cost", r.final_cost},
          {"termination", std::string(to_string(r.termination))},
          {"iteration_costs", r.iteration_costs},
          {"point_matches", r.point_matches},
          {"line_matches", r.line_matches}};
}

json errors_json(const TrajectoryErrors& e) {
  std::vector<double> rot_deg;
  rot_deg.reserve(e.rotation.size());
  for (double r : e.rotation) rot_deg.push_back(r * kRadToDeg);
  return {{"translation", e.translation},
          {"rotation_deg", rot_deg},
          {"mean_translation", e.mean_translation},
          {"mean_rotation_deg", e.mean_rotation * kRadToDeg}};
}

// Commands -----------------------------------------------------------------

std::string frame_file_name(std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%06zu.tmbt", index);
  return name;
}

std::vector<fs::path> list_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw CommandError(kExitIo, "frames directory not found: " + dir.string());
  }
  static const std::regex pattern(R"(frame_(\d{6})\.tmbt)");
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (std::regex_match(entry.path().filename().string(), pattern)) {
      frames.push_back(entry.path());
    }
  }
  std::sort(frames.begin(), frames.end());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].filename() != frame_file_name(i)) {
      throw CommandError(kExitMalformed, "missing frame " + frame_file_name(i) + " in " +
                                             dir.string());
    }
  }
  return frames;
}

void cmd_simulate(const RunConfig& config, const fs::path& config_dir, const fs::path& out) {
  const Trajectory truth = source_trajectory(config, config_dir);
  const TrackerSetup setup = make_setup(config);
  const Trajectory noisy =
      inject_noise(truth, {config.noise_sigma_t, config.noise_sigma_r, config.seed});

  make_dir(out);
  make_dir(out / "frames");
  save_trajectory(truth, out / "truth.traj");
  save_trajectory(noisy, out / "noisy.traj");
  for (std::size_t i = 0; i < truth.size(); ++i) {
    HeatmapFrame frame =
        render(setup.skeleton, truth.samples[i].pose, setup.camera, config.render_sigma);
    if (config.degradation.enabled()) frame = degrade_frame(frame, config.degradation, i);
    save_frame(frame, out / "frames" / frame_file_name(i));
  }
}

void cmd_optimize(const RunConfig& config, const fs::path& trajectory,
                  const fs::path& frames_dir, const fs::path& out) {
  const Trajectory measured = load_input_trajectory(trajectory);
  const std::vector<fs::path> frame_paths = list_frames(frames_dir);
  if (!frame_paths.empty() && frame_paths.size() != measured.size()) {
    throw CommandError(kExitMalformed,
                       "trajectory has " + std::to_string(measured.size()) +
                           " poses but " + frames_dir.string() + " holds " +
                           std::to_string(frame_paths.size()) + " frames");
  }
  const TrackerSetup setup = make_setup(config);

  std::vector<FramePtr> frames(measured.size());
  for (std::size_t i = 0; i < frame_paths.size(); ++i) {
    frames[i] = load_input_frame(frame_paths[i]);
    if (frames[i]->width() != setup.camera.width ||
        frames[i]->height() != setup.camera.height) {
      throw CommandError(kExitMalformed,
                         frame_paths[i].string() + ": frame size does not match camera");
    }
  }

  PoseGraph graph;
  const auto reports = track_sequence(graph, measured.poses(), frames, setup, config.solver);

  Trajectory optimized = measured;
  json keyframes = json::array();
  bool failed = false;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    optimized.samples[i].pose = graph.keyframe(i).estimate;
    keyframes.push_back({{"id", i},
                         {"timestamp", measured.samples[i].timestamp},
                         {"pose", pose_json(optimized.samples[i].pose)},
                         {"optimization", optimization_json(reports[i])}});
    failed = failed || !reports[i].ok();
  }
  const CostBreakdown cost = total_cost(graph, setup);
  const json report = {{"keyframes", keyframes},
                       {"final_cost",
                        {{"total", cost.total},
                         {"relative", cost.relative},
                         {"point", cost.point},
                         {"line", cost.line}}},
                       {"status", failed ? "failed" : "ok"}};

  make_dir(out);
  save_trajectory(optimized, out / "optimized.traj");
  write_text(out / "report.json", report.dump(2) + "\n");

  if (frame_paths.empty()) {
    throw CommandError(kExitSolver,
                       "rank deficient: no image correspondences anchor the trajectory (" +
                           frames_dir.string() + " holds no frames)");
  }
  if (failed) {
    throw CommandError(kExitSolver, "optimization failed for at least one keyframe; see " +
                                        (out / "report.json").string());
  }
}

SweepReport cmd_sweep(const RunConfig& config, const fs::path& config_dir,
                      const fs::path& out) {
  const Trajectory truth = source_trajectory(config, config_dir);
  const TrackerSetup setup = make_setup(config);
  SweepOptions options;
  options.seed = config.seed;
  options.jobs = config.jobs;
  options.render_sigma = config.render_sigma;
  options.degradation = config.degradation;
  const SweepReport report =
      run_sweep(truth, setup, config.noise_grid(), config.solver, options);

  std::ostringstream csv;
  write_sweep_csv(report, csv);
  make_dir(out);
  write_text(out / "sweep.csv", csv.str());
  return report;
}

json cmd_evaluate(const fs::path& estimate, const fs::path& truth) {
  const Trajectory a = load_input_trajectory(estimate);
  const Trajectory b = load_input_trajectory(truth);
  try {
    return errors_json(evaluate(a, b));
  } catch (const std::invalid_argument& e) {
    throw CommandError(kExitMalformed, e.what());
  }
}

void cmd_render(const RunConfig& config, const Pose& pose, bool prior, const fs::path& out) {
  const TrackerSetup setup = make_setup(config);
  const HeatmapFrame frame = prior ? render_priors(setup.skeleton, pose, setup.camera)
                                   : render(setup.skeleton, pose, setup.camera,
                                            config.render_sigma);
  make_dir(out);
  save_frame(frame, out / "frame.tmbt");
  for (int c = 0; c < kChannelCount; ++c) {
    const Channel ch = static_cast<Channel>(c);
    const fs::path pgm = out / ("frame_" + std::string(channel_name(ch)) + ".pgm");
    try {
      write_plane_pgm(frame.channel(ch), pgm);
    } catch (const FrameFormatError& e) {
      throw CommandError(kExitIo, e.what());
    }
  }
}

Pose parse_pose(const std::string& text) {
  std::istringstream in(text);
  double v[7];
  for (double& x : v) {
    if (!(in >> x) || !std::isfinite(x)) {
      throw CommandError(kExitUsage, "--pose expects 7 numbers: tx ty tz qw qx qy qz");
    }
  }
  std::string rest;
  if (in >> rest) throw CommandError(kExitUsage, "--pose expects exactly 7 numbers");
  try {
    return Pose(Vec3(v[0], v[1], v[2]), Quat(v[3], v[4], v[5], v[6]));
  } catch (const std::invalid_argument& e) {
    throw CommandError(kExitUsage, std::string("--pose: ") + e.what());
  }
}

}  // namespace turbloc::cli
