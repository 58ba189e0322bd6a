#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sisde {

/// Count, mean and central moment sums M2..M4 with an order-dependent but
/// deterministic pairwise merge.
struct RunningMoments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;

  void add(double value) noexcept;
  void merge(const RunningMoments& other) noexcept;

  std::size_t count() const noexcept { return static_cast<std::size_t>(n); }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const noexcept;
  double se_mean() const noexcept;
  /// Standard error of the sample variance from the fourth central moment.
  double se_variance() const noexcept;
};

/// Linear interpolation between order statistics (type 7).
double quantile(std::span<const double> values, double level);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;

  bool operator==(const Histogram&) const = default;

  double bin_width() const noexcept {
    return counts.empty() ? 0.0 : (hi - lo) / static_cast<double>(counts.size());
  }
};

/// Equal-width bins spanning [min, max] of the values; every value is counted.
Histogram make_histogram(std::span<const double> values, std::size_t bins);

}  // namespace sisde
