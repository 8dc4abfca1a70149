#include "turbloc_cli/commands.hpp"
#include "turbloc_cli/config.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace fs = std::filesystem;
using namespace turbloc::cli;

namespace {

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
};

RunConfig resolve(const GlobalFlags& g) {
  RunConfig c = g.config.empty() ? RunConfig{} : load_config(g.config);
  if (g.seed) {
    c.seed = *g.seed;
    c.degradation.seed = *g.seed;
  }
  if (g.out) c.output_dir = *g.out;
  if (g.jobs) c.jobs = *g.jobs;
  c.validate();
  return c;
}

fs::path config_dir(const GlobalFlags& g) {
  return g.config.empty() ? fs::path{} : fs::path(g.config).parent_path();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wind turbine inspection localization: simulate, optimize and evaluate"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "RNG seed (overrides the config)");
  app.add_option("--out", g.out, "Output directory (overrides the config)");
  app.add_option("--jobs", g.jobs, "Worker threads for sweep")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Write truth/noisy trajectories and frames");

  std::string trajectory, frames;
  auto* optimize = app.add_subcommand("optimize", "Optimize a measured trajectory");
  optimize->add_option("--trajectory", trajectory, "Measured trajectory file")->required();
  optimize->add_option("--frames", frames, "Directory of frame_NNNNNN.tmbt files")->required();

  auto* sweep = app.add_subcommand("sweep", "Noise sweep over the configured grid");

  std::string estimate, truth;
  auto* evaluate = app.add_subcommand("evaluate", "Compare two trajectories, print JSON");
  evaluate->add_option("estimate", estimate)->required();
  evaluate->add_option("truth", truth)->required();

  std::string pose_text;
  bool prior = false;
  auto* render = app.add_subcommand("render", "Render one frame plus PGM previews");
  render->add_option("--pose", pose_text, "\"tx ty tz qw qx qy qz\" (world from camera)")
      ->required();
  render->add_flag("--prior", prior, "Use the prior smoothing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig config = resolve(g);
    const fs::path out = config.output_dir;
    if (*simulate) {
      cmd_simulate(config, config_dir(g), out);
    } else if (*optimize) {
      cmd_optimize(config, trajectory, frames, out);
    } else if (*sweep) {
      cmd_sweep(config, config_dir(g), out);
    } else if (*evaluate) {
      std::cout << cmd_evaluate(estimate, truth).dump(2) << "\n";
    } else if (*render) {
      cmd_render(config, parse_pose(pose_text), prior, out);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "turbloc: config error: %s\n", e.what());
    return kExitConfig;
  } catch (const CommandError& e) {
    std::fprintf(stderr, "turbloc: %s\n", e.what());
    return e.code();
  }
  return kExitOk;
}
