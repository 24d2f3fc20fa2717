#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace teleop {

/// Seedable generator with platform-independent draws.
///
/// The engine is std::mt19937_64 (whose output sequence is fixed by the
/// standard) seeded through splitmix64. Uniform and normal draws are derived
/// here rather than through std::*_distribution, whose algorithms are
/// implementation-defined.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm =
      "mt19937_64+splitmix64-seed;uniform=u53(0,1];normal=box-muller";

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  /// Independent stream derived from this generator's seed.
  Rng split(std::uint64_t stream) const {
    return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x9E3779B97F4A7C15ULL)));
  }

  /// Uniform on (0, 1], 53 bits of resolution.
  double uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal; consumes exactly two uniforms.
  double normal();

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace teleop
