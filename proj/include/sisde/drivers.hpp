#pragma once

#include <cstddef>
#include <vector>

#include "sisde/random.hpp"

namespace sisde {

/// Uniform dyadic partition of [0, T] with 2^level intervals. Partitions of
/// lower level are subsets of those of higher level.
class Partition {
 public:
  Partition(double horizon, int level);

  double horizon() const noexcept { return horizon_; }
  int level() const noexcept { return level_; }
  std::size_t intervals() const noexcept { return intervals_; }
  std::size_t size() const noexcept { return intervals_ + 1; }
  double mesh() const noexcept { return mesh_; }

  /// i-th grid point; point(intervals()) == horizon exactly.
  double point(std::size_t i) const noexcept;
  std::vector<double> points() const;

  /// Left endpoint t_k of the interval ]t_k, t_{k+1}] containing t; eta(0) = 0.
  double eta(double t) const;
  /// Index k with eta(t) == point(k).
  std::size_t eta_index(double t) const;

 private:
  double horizon_;
  int level_;
  std::size_t intervals_;
  double mesh_;
};

Partition dyadic_partition(double horizon, int level);

/// Increments of a two dimensional Brownian motion over each partition interval.
struct BrownianGrid {
  Partition partition;
  std::vector<double> dw1;
  std::vector<double> dw2;
  double rho = 0.0;  ///< correlation applied to the second component
};

/// Independent N(0, mesh) increments, drawn interleaved (dw1_i, dw2_i) per interval.
BrownianGrid sample_brownian_grid(const Partition& partition, Rng& rng);

/// Replaces dw2 by rho dw1 + sqrt(1 - rho^2) dw2. Throws DomainError for |rho| > 1.
BrownianGrid correlate(const BrownianGrid& grid, double rho);

/// Sums fine increments down to the target level by repeated pairwise halving
/// (left + right at each level), so coarsen(coarsen(g, k), j) == coarsen(g, j)
/// bitwise.
BrownianGrid coarsen(const BrownianGrid& grid, int target_level);

}  // namespace sisde
