#pragma once

#include "turbloc/geometry.hpp"

#include <cstdint>
#include <random>

namespace turbloc {

/// Seedable random source with portable output: the engine is
/// std::mt19937_64 (fully specified by the standard) and the uniform and
/// normal transforms are implemented here rather than taken from
/// <random>'s distributions, whose output varies between standard
/// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream `stream` of base seed `seed`; streams of one seed
  /// never depend on how many other streams are drawn.
  static Rng for_stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  /// Uniform direction on the unit sphere.
  Vec3 unit_vector();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace turbloc
