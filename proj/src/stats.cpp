#include "sisde/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sisde/errors.hpp"

namespace sisde {

void RunningMoments::add(double value) noexcept {
  RunningMoments one;
  one.n = 1.0;
  one.mean = value;
  merge(one);
}

void RunningMoments::merge(const RunningMoments& b) noexcept {
  if (b.n == 0.0) return;
  if (n == 0.0) {
    *this = b;
    return;
  }
  const double na = n;
  const double nb = b.n;
  const double total = na + nb;
  const double delta = b.mean - mean;
  const double d_n = delta / total;
  const double d_n2 = d_n * d_n;
  const double cross = delta * d_n * na * nb;

  const double new_m4 = m4 + b.m4 + cross * d_n2 * (na * na - na * nb + nb * nb) +
                        6.0 * d_n2 * (na * na * b.m2 + nb * nb * m2) +
                        4.0 * d_n * (na * b.m3 - nb * m3);
  const double new_m3 =
      m3 + b.m3 + cross * d_n * (na - nb) + 3.0 * d_n * (na * b.m2 - nb * m2);
  const double new_m2 = m2 + b.m2 + cross;

  mean += d_n * nb;
  m2 = new_m2;
  m3 = new_m3;
  m4 = new_m4;
  n = total;
}

double RunningMoments::variance() const noexcept { return n > 1.0 ? m2 / (n - 1.0) : 0.0; }

double RunningMoments::se_mean() const noexcept {
  return n > 1.0 ? std::sqrt(variance() / n) : 0.0;
}

double RunningMoments::se_variance() const noexcept {
  if (n < 4.0) return 0.0;
  const double s2 = variance();
  const double mu4 = m4 / n;
  const double v = (mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

double quantile(std::span<const double> values, double level) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  if (!(level >= 0.0 && level <= 1.0)) throw DomainError("quantile level outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Histogram make_histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw DomainError("histogram needs at least one bin");
  Histogram h;
  h.counts.assign(bins, 0);
  if (values.empty()) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.hi = *mx;
  if (h.hi == h.lo) {
    h.lo -= 0.5;
    h.hi += 0.5;
  }
  const double width = h.bin_width();
  for (double v : values) {
    auto bin = static_cast<std::size_t>((v - h.lo) / width);
    h.counts[std::min(bin, bins - 1)] += 1;
  }
  return h;
}

}  // namespace sisde
