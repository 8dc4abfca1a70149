#include "turbloc/turbine_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace turbloc {

std::string_view to_string(LineClass c) {
  switch (c) {
    case LineClass::Tower: return "tower";
    case LineClass::Hub: return "hub";
    case LineClass::Blade: return "blade";
  }
  return "?";
}

std::string_view to_string(PointClass c) {
  switch (c) {
    case PointClass::TowerBase: return "tower_base";
    case PointClass::TowerTop: return "tower_top";
    case PointClass::BladeCentre: return "blade_centre";
    case PointClass::BladeTips: return "blade_tips";
  }
  return "?";
}

PointClass point_class(int skeleton_point) {
  switch (skeleton_point) {
    case kTowerBase: return PointClass::TowerBase;
    case kTowerTop: return PointClass::TowerTop;
    case kBladeCentre: return PointClass::BladeCentre;
    default: return PointClass::BladeTips;
  }
}

void TurbineParams::validate() const {
  if (!(tower_height > 0.0)) throw std::invalid_argument("tower_height must be > 0");
  if (!(blade_length > 0.0)) throw std::invalid_argument("blade_length must be > 0");
  if (!(hub_offset >= 0.0)) throw std::invalid_argument("hub_offset must be >= 0");
  if (!base_position.allFinite() || !std::isfinite(heading)) {
    throw std::invalid_argument("turbine position and heading must be finite");
  }
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      double d = std::fmod(std::abs(blade_azimuths[i] - blade_azimuths[j]), kTwoPi);
      d = std::min(d, kTwoPi - d);
      if (d < 1e-9) throw std::invalid_argument("blade azimuths must be distinct");
    }
  }
}

TurbineSkeleton build_skeleton(const TurbineParams& params) {
  params.validate();
  const Vec3 normal(std::cos(params.heading), std::sin(params.heading), 0.0);
  const Vec3 up = Vec3::UnitZ();
  const Vec3 across = up.cross(normal);

  TurbineSkeleton s;
  s.points[kTowerBase] = params.base_position;
  s.points[kTowerTop] = params.base_position + params.tower_height * up;
  s.points[kBladeCentre] = s.points[kTowerTop] + params.hub_offset * normal;
  for (int k = 0; k < 3; ++k) {
    const double a = params.blade_azimuths[k];
    s.points[kBladeTip0 + k] =
        s.points[kBladeCentre] +
        params.blade_length * (std::cos(a) * across + std::sin(a) * up);
  }
  s.lines = {{{kTowerBase, kTowerTop, LineClass::Tower},
              {kTowerTop, kBladeCentre, LineClass::Hub},
              {kBladeCentre, kBladeTip0, LineClass::Blade},
              {kBladeCentre, kBladeTip1, LineClass::Blade},
              {kBladeCentre, kBladeTip2, LineClass::Blade}}};
  return s;
}

SubdividedModel subdivide(const TurbineSkeleton& skeleton, int s_tower,
                          int s_hub, int s_blade) {
  if (s_tower < 2 || s_hub < 2 || s_blade < 2) {
    throw std::invalid_argument("subdivision counts must be at least 2");
  }
  SubdividedModel model;
  model.samples.reserve(s_tower + s_hub + 3 * s_blade);
  for (int id = 0; id < kSkeletonLineCount; ++id) {
    const SkeletonLine& line = skeleton.lines[id];
    const int count = line.cls == LineClass::Tower ? s_tower
                      : line.cls == LineClass::Hub ? s_hub
                                                   : s_blade;
    const Vec3& a = skeleton.points[line.from];
    const Vec3& b = skeleton.points[line.to];
    for (int k = 0; k < count; ++k) {
      // Exact endpoints at k = 0 and k = count - 1.
      const Vec3 p = k == count - 1
                         ? b
                         : Vec3(a + (b - a) * (static_cast<double>(k) / (count - 1)));
      model.samples.push_back({p, line.cls, id});
    }
  }
  return model;
}

}  // namespace turbloc
