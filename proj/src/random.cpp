#include "sisde/random.hpp"

#include <cmath>

namespace sisde {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

Rng Rng::substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

double Rng::normal() { return normal_(engine_); }

double Rng::uniform() {
  double u = uniform_(engine_);
  // generate_canonical may round up to exactly 1.0
  if (u >= 1.0) u = std::nextafter(1.0, 0.0);
  return u;
}

}  // namespace sisde
