#include "turbloc_cli/config.hpp"

#include <json.hpp>

#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace turbloc::cli {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Walks one JSON object, tracking which keys were consumed so leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  double number(const std::string& key, double fallback) {
    if (!take(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number()) fail(child(key), "expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!take(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) fail(child(key), "expected an integer");
    return v.get<int>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!take(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_unsigned()) fail(child(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!take(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) fail(child(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!take(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) fail(child(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::optional<std::size_t> size = {}) {
    take(key);
    const json& v = node_.at(key);
    if (!v.is_array()) fail(child(key), "expected an array of numbers");
    if (size && v.size() != *size) {
      fail(child(key), "expected " + std::to_string(*size) + " numbers");
    }
    std::vector<double> out;
    for (const json& x : v) {
      if (!x.is_number()) fail(child(key), "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  Section section(const std::string& key) {
    take(key);
    return Section(node_.at(key), child(key));
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!used_.count(key)) fail(child(key), "unknown key");
    }
  }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError((where.empty() ? std::string("config") : where) + ": " + what);
  }

 private:
  bool take(const std::string& key) {
    if (!node_.contains(key)) return false;
    used_.insert(key);
    return true;
  }

  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

void parse_turbine(Section s, TurbineParams& t) {
  if (s.has("base_position")) {
    const auto p = s.numbers("base_position", 3);
    t.base_position = Vec3(p[0], p[1], p[2]);
  }
  t.heading = s.number("heading_deg", t.heading / kDeg) * kDeg;
  t.tower_height = s.number("tower_height", t.tower_height);
  t.hub_offset = s.number("hub_offset", t.hub_offset);
  t.blade_length = s.number("blade_length", t.blade_length);
  if (s.has("blade_azimuths_deg")) {
    const auto a = s.numbers("blade_azimuths_deg", 3);
    for (int i = 0; i < 3; ++i) t.blade_azimuths[i] = a[i] * kDeg;
  }
  s.finish();
}

void parse_camera(Section s, CameraIntrinsics& k) {
  k.fx = s.number("fx", k.fx);
  k.fy = s.number("fy", k.fy);
  k.cx = s.number("cx", k.cx);
  k.cy = s.number("cy", k.cy);
  k.width = s.integer("width", k.width);
  k.height = s.integer("height", k.height);
  s.finish();
}

void parse_match(Section s, MatchConfig& m) {
  m.r_point = s.number("r_point", m.r_point);
  m.lambda_point = s.number("lambda_point", m.lambda_point);
  m.a_line = s.number("a_line", m.a_line);
  m.k_line = s.integer("k_line", m.k_line);
  m.lambda_line = s.number("lambda_line", m.lambda_line);
  m.line_keep_tolerance = s.number("line_keep_tolerance", m.line_keep_tolerance);
  m.s_tower = s.integer("s_tower", m.s_tower);
  m.s_hub = s.integer("s_hub", m.s_hub);
  m.s_blade = s.integer("s_blade", m.s_blade);
  m.subpixel_points = s.boolean("subpixel_points", m.subpixel_points);
  s.finish();
}

void parse_weights(Section s, GraphWeights& w) {
  w.beta_t = s.number("beta_t", w.beta_t);
  w.beta_rot = s.number("beta_rot", w.beta_rot);
  w.beta_p = s.number("beta_p", w.beta_p);
  w.beta_line = s.number("beta_line", w.beta_line);
  if (s.has("relative_per_axis")) {
    const auto v = s.numbers("relative_per_axis", 6);
    w.relative_diagonal = Vec6(v.data());
  }
  s.finish();
}

void parse_solver(Section s, SolverConfig& c) {
  c.max_iterations = s.integer("max_iterations", c.max_iterations);
  c.cost_tolerance = s.number("cost_tolerance", c.cost_tolerance);
  c.step_tolerance = s.number("step_tolerance", c.step_tolerance);
  c.damping_floor = s.number("damping_floor", c.damping_floor);
  c.window = s.integer("window", c.window);
  c.patience = s.integer("patience", c.patience);
  c.coarse_scale = s.number("coarse_scale", c.coarse_scale);
  s.finish();
}

LookAt parse_look_at(const std::string& v, const std::string& where) {
  if (v == "blade_centre") return LookAt::BladeCentre;
  if (v == "skeleton_centroid") return LookAt::SkeletonCentroid;
  Section::fail(where, "expected \"blade_centre\" or \"skeleton_centroid\"");
}

void parse_trajectory(Section s, TrajectorySource& t) {
  if (s.has("file") && s.has("orbit")) {
    Section::fail(s.child("file"), "give either file or orbit, not both");
  }
  if (s.has("file")) t.file = s.string("file", "");
  if (s.has("orbit")) {
    Section o = s.section("orbit");
    t.orbit.radius = o.number("radius", t.orbit.radius);
    t.orbit.n_keyframes = o.integer("n_keyframes", t.orbit.n_keyframes);
    if (o.has("look_at")) {
      t.orbit.look_at = parse_look_at(o.string("look_at", ""), o.child("look_at"));
    }
    o.finish();
  }
  s.finish();
}

template <typename Fn>
void check(const std::string& where, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  check("turbine", [&] { turbine.validate(); });
  check("camera", [&] { camera.validate(); });
  check("match", [&] { match.validate(); });
  check("weights", [&] { weights.validate(); });
  check("solver", [&] { solver.validate(); });
  check("noise", [&] {
    NoiseSpec{noise_sigma_t, noise_sigma_r, seed}.validate();
  });
  if (!(render_sigma > 0.0)) throw ConfigError("render.sigma: must be > 0");
  if (!(degradation.pixel_sigma >= 0.0) || !(degradation.peak_jitter >= 0.0)) {
    throw ConfigError("degradation: values must be >= 0");
  }
  if (sweep_sigma_t.empty() != sweep_sigma_r.empty()) {
    throw ConfigError("sweep: give both sigma_t and sigma_r_deg, or neither");
  }
  for (double v : sweep_sigma_t) {
    if (!(v >= 0.0)) throw ConfigError("sweep.sigma_t: values must be >= 0");
  }
  for (double v : sweep_sigma_r) {
    if (!(v >= 0.0)) throw ConfigError("sweep.sigma_r_deg: values must be >= 0");
  }
  if (jobs < 1) throw ConfigError("sweep.jobs: must be >= 1");
  if (!trajectory.file) {
    if (trajectory.orbit.n_keyframes < 2) {
      throw ConfigError("trajectory.orbit.n_keyframes: must be >= 2");
    }
    if (!(trajectory.orbit.radius > turbine.blade_length)) {
      throw ConfigError("trajectory.orbit.radius: must exceed turbine.blade_length");
    }
  }
}

std::vector<NoiseCell> RunConfig::noise_grid() const {
  if (sweep_sigma_t.empty()) return default_noise_grid();
  std::vector<NoiseCell> grid;
  for (double t : sweep_sigma_t) {
    for (double r : sweep_sigma_r) grid.push_back({t, r});
  }
  return grid;
}

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig c;
  Section root(doc, "");
  if (root.has("turbine")) parse_turbine(root.section("turbine"), c.turbine);
  if (root.has("camera")) parse_camera(root.section("camera"), c.camera);
  if (root.has("match")) parse_match(root.section("match"), c.match);
  if (root.has("weights")) parse_weights(root.section("weights"), c.weights);
  if (root.has("solver")) parse_solver(root.section("solver"), c.solver);
  if (root.has("render")) {
    Section s = root.section("render");
    c.render_sigma = s.number("sigma", c.render_sigma);
    s.finish();
  }
  if (root.has("noise")) {
    Section s = root.section("noise");
    c.noise_sigma_t = s.number("sigma_t", c.noise_sigma_t);
    c.noise_sigma_r = s.number("sigma_r_deg", c.noise_sigma_r / kDeg) * kDeg;
    s.finish();
  }
  if (root.has("degradation")) {
    Section s = root.section("degradation");
    c.degradation.pixel_sigma = s.number("pixel_sigma", 0.0);
    c.degradation.peak_jitter = s.number("peak_jitter", 0.0);
    s.finish();
  }
  if (root.has("sweep")) {
    Section s = root.section("sweep");
    if (s.has("sigma_t")) c.sweep_sigma_t = s.numbers("sigma_t");
    if (s.has("sigma_r_deg")) {
      for (double v : s.numbers("sigma_r_deg")) c.sweep_sigma_r.push_back(v * kDeg);
    }
    c.jobs = s.integer("jobs", c.jobs);
    s.finish();
  }
  if (root.has("trajectory")) parse_trajectory(root.section("trajectory"), c.trajectory);
  c.seed = root.unsigned_integer("seed", c.seed);
  c.output_dir = root.string("output_dir", c.output_dir.string());
  root.finish();

  c.degradation.seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

Trajectory load_trajectory(const RunConfig& config, const std::filesystem::path& base) {
  if (config.trajectory.file) {
    std::filesystem::path p = *config.trajectory.file;
    if (p.is_relative() && !base.empty()) p = base / p;
    return read_trajectory(p);
  }
  const TurbineSkeleton skeleton = build_skeleton(config.turbine);
  return generate_orbit_trajectory(skeleton, config.trajectory.orbit.radius,
                                   config.trajectory.orbit.n_keyframes,
                                   config.trajectory.orbit.look_at);
}

}  // namespace turbloc::cli
