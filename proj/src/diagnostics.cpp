#include "sisde/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>
#include <utility>

#include "sisde/errors.hpp"
#include "sisde/parallel.hpp"

namespace sisde {

double a_seq(int h) {
  if (h < 0) throw DomainError("a_seq needs h >= 0");
  const double hd = static_cast<double>(h);
  return std::exp(-hd * (hd + 1.0) / 2.0);
}

// Phi_h''(u) = (2 / (h u)) sin^2(pi s) with s = ln(u / a_h) / h in (0, 1). It
// is continuous, vanishes at both ends and has unit integral. Then
//   Phi_h'(u) = s - sin(2 pi s) / (2 pi)
//   Phi_h(u)  = a_h [E (s - 1/h) + 1/h - h (E (h sin 2 pi s - 2 pi cos 2 pi s) + 2 pi)
//                                        / (2 pi (h^2 + 4 pi^2))],  E = u / a_h.
ThetaFamily::ThetaFamily(int h) : h_(h), lower_(0.0), upper_(0.0), phi_at_upper_(0.0) {
  if (h < 1) throw DomainError("theta family needs h >= 1");
  lower_ = a_seq(h);
  upper_ = a_seq(h - 1);
  phi_at_upper_ = phi(upper_);
}

double ThetaFamily::phi(double u) const noexcept {
  if (u <= lower_) return 0.0;
  const double hd = static_cast<double>(h_);
  if (u >= upper_ && phi_at_upper_ > 0.0) return phi_at_upper_ + (u - upper_);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double ratio = u / lower_;
  const double s = std::min(std::log(ratio) / hd, 1.0);
  const double oscillating =
      hd * (ratio * (hd * std::sin(two_pi * s) - two_pi * std::cos(two_pi * s)) + two_pi) /
      (two_pi * (hd * hd + two_pi * two_pi));
  const double value = lower_ * (ratio * (s - 1.0 / hd) + 1.0 / hd - oscillating);
  return std::max(value, 0.0);
}

double ThetaFamily::phi_prime(double u) const noexcept {
  if (u <= lower_) return 0.0;
  if (u >= upper_) return 1.0;
  const double s = std::log(u / lower_) / static_cast<double>(h_);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return std::clamp(s - std::sin(two_pi * s) / two_pi, 0.0, 1.0);
}

double ThetaFamily::theta(double u) const noexcept { return phi(std::abs(u)); }

double ThetaFamily::theta_prime(double u) const noexcept {
  const double d = phi_prime(std::abs(u));
  return u < 0.0 ? -d : d;
}

double ThetaFamily::theta_second(double u) const noexcept {
  const double v = std::abs(u);
  if (!(v > lower_ && v < upper_)) return 0.0;
  const double hd = static_cast<double>(h_);
  const double s = std::log(v / lower_) / hd;
  const double bump = std::sin(std::numbers::pi * s);
  return 2.0 / (hd * v) * bump * bump;
}

UniformBound uniform_bound_G(double x0, double M, double horizon, double sup_mean_1_plus_abs_y,
                             double sup_mean_1_plus_abs_y_sq) {
  if (!(M >= 0.0) || !(horizon >= 0.0)) throw DomainError("uniform bound needs M, T >= 0");
  UniformBound out;
  out.G = std::abs(x0) + M * horizon * sup_mean_1_plus_abs_y +
          M * std::sqrt(horizon * sup_mean_1_plus_abs_y_sq);
  out.bound = out.G * std::exp(M * horizon);
  return out;
}

double step_constant_M1(double M, const UniformBound& g, double sup_mean_1_plus_abs_y,
                        double sup_mean_1_plus_abs_y_sq) {
  return M * (g.bound + sup_mean_1_plus_abs_y + std::sqrt(sup_mean_1_plus_abs_y_sq));
}

bool ConvergenceReport::uniform_bound_holds() const noexcept {
  return std::all_of(levels.begin(), levels.end(), [this](const LevelSummary& s) {
    return s.max_mean_abs_x <= uniform_bound + 3.0 * s.max_mean_abs_x_se;
  });
}

double declared_growth(const TriangularModel& model) noexcept {
  return std::max(model.drift.growth_M, model.diffusion.growth_M);
}

namespace {

void merge_all(std::vector<RunningMoments>& into, const std::vector<RunningMoments>& from) {
  if (into.empty()) into.resize(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) into[i].merge(from[i]);
}

struct YMoments {
  std::vector<RunningMoments> first;   // 1 + |Y|
  std::vector<RunningMoments> second;  // (1 + |Y|)^2

  void add(const std::vector<double>& y) {
    if (first.empty()) {
      first.resize(y.size());
      second.resize(y.size());
    }
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double v = 1.0 + std::abs(y[k]);
      first[k].add(v);
      second[k].add(v * v);
    }
  }
  void merge(const YMoments& o) {
    merge_all(first, o.first);
    merge_all(second, o.second);
  }
  double sup_first() const {
    double s = 0.0;
    for (const auto& m : first) s = std::max(s, m.mean);
    return s;
  }
  double sup_second() const {
    double s = 0.0;
    for (const auto& m : second) s = std::max(s, m.mean);
    return s;
  }
};

// index of the largest mean and its value / standard error
std::pair<double, double> max_mean(const std::vector<RunningMoments>& series) {
  double best = -std::numeric_limits<double>::infinity();
  double se = 0.0;
  for (const auto& m : series) {
    if (m.mean > best) {
      best = m.mean;
      se = m.se_mean();
    }
  }
  return {best, se};
}

double fit_slope(const std::vector<LevelPairError>& pairs) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : pairs) {
    if (p.l1_error > 0.0) pts.emplace_back(std::log(p.mesh), std::log(p.l1_error));
  }
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

}  // namespace

ConvergenceReport cauchy_errors(const TriangularModel& model, const std::vector<int>& levels,
                                std::size_t paths, std::uint64_t seed, unsigned workers) {
  if (levels.size() < 2) throw DomainError("cauchy_errors needs at least two levels");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] <= levels[i - 1]) throw DomainError("levels must be strictly increasing");
  }
  if (levels.front() < 0) throw DomainError("levels must be nonnegative");
  if (paths < 1) throw DomainError("cauchy_errors needs at least one path");

  const std::size_t n_levels = levels.size();
  const Partition finest(model.horizon, levels.back());

  struct Acc {
    std::vector<RunningMoments> l1;
    std::vector<RunningMoments> sup;
    std::vector<std::vector<RunningMoments>> abs_x;
    YMoments y;

    void merge(const Acc& o) {
      merge_all(l1, o.l1);
      merge_all(sup, o.sup);
      if (abs_x.empty()) abs_x.resize(o.abs_x.size());
      for (std::size_t i = 0; i < o.abs_x.size(); ++i) merge_all(abs_x[i], o.abs_x[i]);
      y.merge(o.y);
    }
  };
  Acc zero;
  zero.l1.resize(n_levels - 1);
  zero.sup.resize(n_levels - 1);
  zero.abs_x.resize(n_levels);
  for (std::size_t i = 0; i < n_levels; ++i) {
    zero.abs_x[i].resize(Partition(model.horizon, levels[i]).size());
  }

  const Acc acc = reduce_paths(paths, seed, workers, zero, [&](std::size_t, Rng& rng, Acc& a) {
    BrownianGrid grid = correlate(sample_brownian_grid(finest, rng), model.rho);
    std::vector<std::vector<double>> xs(n_levels);
    for (std::size_t i = n_levels; i-- > 0;) {
      grid = coarsen(grid, levels[i]);
      JointPath run = simulate_triangular(model, grid);
      if (i + 1 == n_levels) a.y.add(run.y);
      xs[i] = std::move(run.x);
    }
    for (std::size_t i = 0; i < n_levels; ++i) {
      const auto& x = xs[i];
      for (std::size_t k = 0; k < x.size(); ++k) a.abs_x[i][k].add(std::abs(x[k]));
    }
    for (std::size_t i = 0; i + 1 < n_levels; ++i) {
      const auto& coarse = xs[i];
      const auto& fine = xs[i + 1];
      const std::size_t stride = std::size_t{1} << (levels[i + 1] - levels[i]);
      double sup = 0.0;
      for (std::size_t k = 0; k < coarse.size(); ++k) {
        sup = std::max(sup, std::abs(coarse[k] - fine[k * stride]));
      }
      a.l1[i].add(std::abs(coarse.back() - fine.back()));
      a.sup[i].add(sup);
    }
  });

  ConvergenceReport report;
  report.paths = paths;
  report.seed = seed;
  report.horizon = model.horizon;
  report.M = declared_growth(model);
  report.sup_mean_1_plus_abs_y = acc.y.sup_first();
  report.sup_mean_1_plus_abs_y_sq = acc.y.sup_second();
  const UniformBound g = uniform_bound_G(model.x0, report.M, model.horizon,
                                         report.sup_mean_1_plus_abs_y,
                                         report.sup_mean_1_plus_abs_y_sq);
  report.G = g.G;
  report.uniform_bound = g.bound;
  report.M1 = step_constant_M1(report.M, g, report.sup_mean_1_plus_abs_y,
                               report.sup_mean_1_plus_abs_y_sq);
  report.gamma2 = report.M / 2.0 * report.sup_mean_1_plus_abs_y_sq;

  for (std::size_t i = 0; i < n_levels; ++i) {
    LevelSummary s;
    s.level = levels[i];
    s.mesh = Partition(model.horizon, levels[i]).mesh();
    s.gamma1 = 1.0 + report.M * s.mesh;
    std::tie(s.max_mean_abs_x, s.max_mean_abs_x_se) = max_mean(acc.abs_x[i]);
    report.levels.push_back(s);
  }
  for (std::size_t i = 0; i + 1 < n_levels; ++i) {
    LevelPairError e;
    e.level = levels[i];
    e.mesh = report.levels[i].mesh;
    e.l1_error = acc.l1[i].mean;
    e.l1_se = acc.l1[i].se_mean();
    e.sup_error = acc.sup[i].mean;
    e.sup_se = acc.sup[i].se_mean();
    report.pairs.push_back(e);
  }
  report.slope = fit_slope(report.pairs);
  return report;
}

StepBoundReport step_bound_check(const TriangularModel& model, const Partition& partition,
                                 std::size_t paths, std::uint64_t seed, unsigned workers) {
  if (paths < 1) throw DomainError("step_bound_check needs at least one path");
  struct Acc {
    std::vector<RunningMoments> increments;
    YMoments y;
    void merge(const Acc& o) {
      merge_all(increments, o.increments);
      y.merge(o.y);
    }
  };
  Acc zero;
  zero.increments.resize(partition.intervals());
  const Acc acc = reduce_paths(paths, seed, workers, zero, [&](std::size_t, Rng& rng, Acc& a) {
    const JointPath path = simulate_triangular(model, partition, rng);
    for (std::size_t k = 0; k + 1 < path.x.size(); ++k) {
      a.increments[k].add(std::abs(path.x[k + 1] - path.x[k]));
    }
    a.y.add(path.y);
  });

  StepBoundReport report;
  report.level = partition.level();
  report.mesh = partition.mesh();
  std::tie(report.empirical, report.empirical_se) = max_mean(acc.increments);
  const double M = declared_growth(model);
  const UniformBound g =
      uniform_bound_G(model.x0, M, model.horizon, acc.y.sup_first(), acc.y.sup_second());
  report.M1 = step_constant_M1(M, g, acc.y.sup_first(), acc.y.sup_second());
  report.bound = report.M1 * std::sqrt(report.mesh);
  report.pass = report.empirical <= report.bound + 3.0 * report.empirical_se;
  return report;
}

double initial_condition_gap(const TriangularModel& model, const BrownianGrid& grid, double x0,
                             double z0) {
  TriangularModel first = model;
  first.x0 = x0;
  TriangularModel second = model;
  second.x0 = z0;
  const JointPath x = simulate_triangular(first, grid);
  const JointPath z = simulate_triangular(second, grid);
  double gap = 0.0;
  for (std::size_t k = 0; k < x.x.size(); ++k) gap = std::max(gap, std::abs(x.x[k] - z.x[k]));
  return gap;
}

double pathwise_uniqueness_check(const TriangularModel& model, const BrownianGrid& grid, double x0) {
  return initial_condition_gap(model, grid, x0, x0);
}

}  // namespace sisde
