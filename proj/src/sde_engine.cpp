#include "sisde/sde_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sisde/errors.hpp"
#include "sisde/parallel.hpp"

namespace sisde {

namespace {

void require_length(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw DomainError(std::string(what) + " has " + std::to_string(v.size()) +
                      " entries, expected " + std::to_string(n));
  }
}

struct Frozen {
  double drift;
  double noise;
  bool inside;
};

Frozen freeze(const DriftSpec& drift, const QuadraticDiffusionSpec& diffusion, double t, double y,
              double x) {
  const Roots r = roots(diffusion, t, y);
  const bool inside = x >= r.lower && x <= r.upper;
  const double a = drift.a(t, y, std::clamp(x, r.lower, r.upper));
  double g = 0.0;
  if (x > r.lower && x < r.upper) {
    g = std::sqrt(diffusion.scale_at(t, y) * (x - r.lower) * (r.upper - x));
  }
  return {a, g, inside};
}

}  // namespace

double SchemePath::value_at(double t, double driver_increment) const {
  const std::size_t k = partition.eta_index(t);
  if (t == 0.0) return x0;
  return x[k] + drift[k] * (t - partition.point(k)) + noise[k] * driver_increment;
}

std::vector<double> simulate_Y(double y0, double mu, const Partition& partition,
                               std::span<const double> dw1, bool absorbing) {
  if (!(y0 >= 0.0)) throw DomainError("square-root process needs y0 >= 0");
  if (!(mu >= 0.0)) throw DomainError("square-root process needs mu >= 0");
  const std::size_t n = partition.intervals();
  require_length(dw1, n, "dw1");
  std::vector<double> y(n + 1, 0.0);
  y[0] = y0;
  const double two_mu = 2.0 * mu;
  bool absorbed = absorbing && y0 <= 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (absorbed) {
      y[k + 1] = 0.0;
      continue;
    }
    const double next = y[k] + std::sqrt(two_mu * std::max(y[k], 0.0)) * dw1[k];
    if (absorbing && next <= 0.0) {
      absorbed = true;
      y[k + 1] = 0.0;
    } else {
      y[k + 1] = next;
    }
  }
  return y;
}

std::vector<double> simulate_driving(const YDynamics& dynamics, double y0,
                                     const Partition& partition, std::span<const double> dw1) {
  if (const auto* sq = std::get_if<SquareRootY>(&dynamics)) {
    return simulate_Y(y0, sq->mu, partition, dw1, sq->absorbing);
  }
  const auto& general = std::get<GeneralY>(dynamics);
  const std::size_t n = partition.intervals();
  require_length(dw1, n, "dw1");
  const double h = partition.mesh();
  std::vector<double> y(n + 1);
  y[0] = y0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = partition.point(k);
    y[k + 1] = y[k] + general.m(t, y[k]) * h + general.sigma(t, y[k]) * dw1[k];
  }
  return y;
}

SchemePath euler_peano_path(const DriftSpec& drift, const QuadraticDiffusionSpec& diffusion,
                            std::span<const double> y, double x0, const Partition& partition,
                            std::span<const double> dw2) {
  const std::size_t n = partition.intervals();
  require_length(y, n + 1, "driving path");
  require_length(dw2, n, "dw2");
  SchemePath path{partition, x0, std::vector<double>(n + 1), std::vector<double>(n),
                  std::vector<double>(n), 0};
  path.x[0] = x0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = partition.point(k);
    const double dt = partition.point(k + 1) - t;
    const Frozen f = freeze(drift, diffusion, t, y[k], path.x[k]);
    if (k > 0 && !f.inside) ++path.exits;
    path.drift[k] = f.drift;
    path.noise[k] = f.noise;
    path.x[k + 1] = path.x[k] + f.drift * dt + f.noise * dw2[k];
  }
  const Roots last = roots(diffusion, partition.horizon(), y[n]);
  if (n > 0 && !(path.x[n] >= last.lower && path.x[n] <= last.upper)) ++path.exits;
  return path;
}

JointPath simulate_triangular(const TriangularModel& model, const BrownianGrid& grid) {
  std::vector<double> y = simulate_driving(model.driving, model.y0, grid.partition, grid.dw1);
  SchemePath x = euler_peano_path(model.drift, model.diffusion, y, model.x0, grid.partition, grid.dw2);
  return JointPath{grid.partition, std::move(x.x), std::move(y), x.exits, 0};
}

JointPath simulate_triangular(const TriangularModel& model, const Partition& partition, Rng& rng) {
  const BrownianGrid grid = correlate(sample_brownian_grid(partition, rng), model.rho);
  return simulate_triangular(model, grid);
}

JointPath simulate_full_2d(const TransitionTable& table, State2 s0, const BrownianGrid& grid) {
  const Partition& partition = grid.partition;
  const std::size_t n = partition.intervals();
  JointPath path{partition, std::vector<double>(n + 1), std::vector<double>(n + 1), 0, 0};
  path.x[0] = s0.s1;
  path.y[0] = s0.s2;
  double s1 = s0.s1;
  double s2 = s0.s2;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = partition.point(k);
    const double dt = partition.point(k + 1) - t;
    const double c1 = std::max(s1, 0.0);
    const double c2 = std::max(s2, 0.0);
    if (c1 != s1 || c2 != s2) ++path.clamps;
    const Rates r = table.evaluate(t, c1, c2);
    const auto mu = drift_from_rates(r, table.lambda1, table.lambda2);
    Matrix2 b;
    try {
      b = sqrt_matrix(covariance_from_rates(r, table.lambda1, table.lambda2));
    } catch (const DegenerateMatrixError& e) {
      throw NumericalFailure(e.what(), k);
    }
    const double w1 = grid.dw1[k];
    const double w2 = grid.dw2[k];
    s1 += mu[0] * dt + b.m11 * w1 + b.m12 * w2;
    s2 += mu[1] * dt + b.m21 * w1 + b.m22 * w2;
    if (!std::isfinite(s1) || !std::isfinite(s2)) {
      throw NumericalFailure("non-finite state in two dimensional scheme", k);
    }
    path.x[k + 1] = s1;
    path.y[k + 1] = s2;
  }
  return path;
}

JointPath simulate_full_2d(const TransitionTable& table, State2 s0, const Partition& partition,
                           Rng& rng) {
  return simulate_full_2d(table, s0, sample_brownian_grid(partition, rng));
}

std::vector<double> degenerate_solution(const DriftSpec& drift, const ScalarField& alpha,
                                        std::span<const double> y, double x0,
                                        const Partition& partition) {
  const std::size_t n = partition.intervals();
  require_length(y, n + 1, "driving path");
  std::vector<double> x(n + 1);
  x[0] = x0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = partition.point(k);
    const double dt = partition.point(k + 1) - t;
    x[k + 1] = x[k] + drift.a(t, y[k], alpha(t, y[k]) / 2.0) * dt;
  }
  return x;
}

namespace {

struct EnsembleAccumulator {
  std::vector<double> times;
  std::vector<RunningMoments> x;
  std::vector<RunningMoments> y;
  std::vector<double> x_final;
  std::vector<double> y_final;
  std::size_t exits = 0;
  std::size_t clamps = 0;

  void add(const JointPath& path) {
    if (times.empty()) {
      times = path.partition.points();
      x.assign(times.size(), {});
      y.assign(times.size(), {});
    }
    if (path.x.size() != times.size() || path.y.size() != times.size()) {
      throw DomainError("ensemble paths must share one partition");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
      x[k].add(path.x[k]);
      y[k].add(path.y[k]);
    }
    x_final.push_back(path.x.back());
    y_final.push_back(path.y.back());
    exits += path.exits;
    clamps += path.clamps;
  }

  void merge(const EnsembleAccumulator& other) {
    if (other.times.empty()) return;
    if (times.empty()) {
      times = other.times;
      x.assign(times.size(), {});
      y.assign(times.size(), {});
    }
    if (other.times.size() != times.size()) {
      throw DomainError("ensemble paths must share one partition");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
      x[k].merge(other.x[k]);
      y[k].merge(other.y[k]);
    }
    x_final.insert(x_final.end(), other.x_final.begin(), other.x_final.end());
    y_final.insert(y_final.end(), other.y_final.begin(), other.y_final.end());
    exits += other.exits;
    clamps += other.clamps;
  }
};

MomentSeries to_series(const std::vector<RunningMoments>& moments) {
  MomentSeries s;
  for (const auto& m : moments) {
    s.mean.push_back(m.mean);
    s.var.push_back(m.variance());
    s.se_mean.push_back(m.se_mean());
    s.se_var.push_back(m.se_variance());
  }
  return s;
}

}  // namespace

EnsembleStats ensemble(const PathSimulator& simulate, const EnsembleOptions& options) {
  if (options.paths < 1) throw DomainError("ensemble needs at least one path");
  const EnsembleAccumulator acc = reduce_paths(
      options.paths, options.seed, options.workers, EnsembleAccumulator{},
      [&](std::size_t i, Rng& rng, EnsembleAccumulator& block) { block.add(simulate(i, rng)); });

  EnsembleStats stats;
  stats.times = acc.times;
  stats.x = to_series(acc.x);
  stats.y = to_series(acc.y);
  stats.quantile_levels = options.quantile_levels;
  for (double level : options.quantile_levels) {
    stats.x_quantiles.push_back(quantile(acc.x_final, level));
    stats.y_quantiles.push_back(quantile(acc.y_final, level));
  }
  stats.x_histogram = make_histogram(acc.x_final, options.histogram_bins);
  stats.y_histogram = make_histogram(acc.y_final, options.histogram_bins);
  stats.paths = options.paths;
  stats.seed = options.seed;
  stats.exits = acc.exits;
  stats.clamps = acc.clamps;
  return stats;
}

}  // namespace sisde
