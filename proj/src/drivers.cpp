#include "sisde/drivers.hpp"

#include <cmath>
#include <string>

#include "sisde/errors.hpp"

namespace sisde {

namespace {

constexpr int kMaxLevel = 30;

std::vector<double> halve(const std::vector<double>& fine) {
  std::vector<double> coarse(fine.size() / 2);
  for (std::size_t i = 0; i < coarse.size(); ++i) coarse[i] = fine[2 * i] + fine[2 * i + 1];
  return coarse;
}

}  // namespace

Partition::Partition(double horizon, int level) : horizon_(horizon), level_(level) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("partition horizon must be positive and finite");
  }
  if (level < 0 || level > kMaxLevel) {
    throw DomainError("partition level must lie in [0, " + std::to_string(kMaxLevel) + "]");
  }
  intervals_ = std::size_t{1} << level;
  mesh_ = std::ldexp(horizon, -level);
}

double Partition::point(std::size_t i) const noexcept {
  if (i >= intervals_) return horizon_;
  return static_cast<double>(i) * mesh_;
}

std::vector<double> Partition::points() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = point(i);
  return out;
}

std::size_t Partition::eta_index(double t) const {
  if (!(t >= 0.0) || t > horizon_) {
    throw DomainError("eta: t = " + std::to_string(t) + " outside [0, T]");
  }
  if (t == 0.0) return 0;
  auto k = static_cast<std::size_t>(std::ceil(t / mesh_));
  k = k == 0 ? 0 : k - 1;
  if (k >= intervals_) k = intervals_ - 1;
  // repair rounding of t / mesh so that point(k) < t <= point(k + 1)
  while (k > 0 && !(point(k) < t)) --k;
  while (k + 1 < intervals_ && point(k + 1) < t) ++k;
  return k;
}

double Partition::eta(double t) const { return point(eta_index(t)); }

Partition dyadic_partition(double horizon, int level) { return Partition(horizon, level); }

BrownianGrid sample_brownian_grid(const Partition& partition, Rng& rng) {
  const std::size_t n = partition.intervals();
  const double scale = std::sqrt(partition.mesh());
  BrownianGrid grid{partition, std::vector<double>(n), std::vector<double>(n), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    grid.dw1[i] = scale * rng.normal();
    grid.dw2[i] = scale * rng.normal();
  }
  return grid;
}

BrownianGrid correlate(const BrownianGrid& grid, double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("correlation must lie in [-1, 1]");
  BrownianGrid out = grid;
  out.rho = rho;
  if (rho == 0.0) return out;
  const double complement = std::sqrt(1.0 - rho * rho);
  for (std::size_t i = 0; i < out.dw2.size(); ++i) {
    out.dw2[i] = rho * grid.dw1[i] + complement * grid.dw2[i];
  }
  return out;
}

BrownianGrid coarsen(const BrownianGrid& grid, int target_level) {
  const int level = grid.partition.level();
  if (target_level < 0 || target_level > level) {
    throw DomainError("coarsen: target level " + std::to_string(target_level) +
                      " not in [0, " + std::to_string(level) + "]");
  }
  BrownianGrid out = grid;
  for (int k = level; k > target_level; --k) {
    out.dw1 = halve(out.dw1);
    out.dw2 = halve(out.dw2);
  }
  out.partition = Partition(grid.partition.horizon(), target_level);
  return out;
}

}  // namespace sisde
