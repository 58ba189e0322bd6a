#pragma once

#include <cstdint>
#include <random>

namespace sisde {

// Mersenne twister stream with standard normal and uniform draws. Each Monte
// Carlo path owns one stream derived from (seed, path index), so ensembles are
// reproducible independent of how paths are scheduled.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng substream(std::uint64_t seed, std::uint64_t index);

  double normal();

  /// Uniform on [0, 1).
  double uniform();

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace sisde
