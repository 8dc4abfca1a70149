#include <turbloc/heatmap.hpp>
#include <turbloc/matching.hpp>
#include <turbloc/posegraph.hpp>
#include <turbloc/simulation.hpp>

#include <benchmark/benchmark.h>

#include <numbers>

using namespace turbloc;

namespace {

TrackerSetup setup() {
  return TrackerSetup::make(TurbineParams{}, CameraIntrinsics{}, MatchConfig{}, GraphWeights{});
}

void BM_Render(benchmark::State& state) {
  const TrackerSetup s = setup();
  const Pose pose = generate_orbit_trajectory(s.skeleton, 30.0, 8).samples[1].pose;
  for (auto _ : state) benchmark::DoNotOptimize(render(s.skeleton, pose, s.camera, 5.0));
}
BENCHMARK(BM_Render);

void BM_MatchFrame(benchmark::State& state) {
  const TrackerSetup s = setup();
  const Pose truth = generate_orbit_trajectory(s.skeleton, 30.0, 8).samples[1].pose;
  const HeatmapFrame f = render(s.skeleton, truth, s.camera, 5.0);
  const Pose off(truth.translation(), truth.rotation() * quaternion_exp(Vec3(0, 0.035, 0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(match_frame(s.skeleton, s.samples, off, s.camera, f, s.match));
  }
}
BENCHMARK(BM_MatchFrame);

// Tracks a noisy orbit of `range` keyframes end to end.
void BM_TrackSequence(benchmark::State& state) {
  const TrackerSetup s = setup();
  const Trajectory truth =
      generate_orbit_trajectory(s.skeleton, 30.0, static_cast<int>(state.range(0)));
  const Trajectory noisy = inject_noise(truth, {0.05, 5.0 * std::numbers::pi / 180.0, 1});
  const auto frames = simulate_measurements(truth, s.skeleton, s.camera);
  for (auto _ : state) {
    PoseGraph graph;
    benchmark::DoNotOptimize(track_sequence(graph, noisy.poses(), frames, s, {}));
  }
}
BENCHMARK(BM_TrackSequence)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
