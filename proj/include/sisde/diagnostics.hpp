#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sisde/drivers.hpp"
#include "sisde/sde_engine.hpp"

namespace sisde {

/// a_h = exp(-h (h + 1) / 2): a_0 = 1 and the integral of 1/u over
/// [a_h, a_{h-1}] equals h.
double a_seq(int h);

/// Smooth approximation theta_h(u) = Phi_h(|u|) of |u| with
///   Phi_h''(u) = (2 / (h u)) sin^2(pi ln(u / a_h) / h) on (a_h, a_{h-1}), 0 elsewhere.
/// The bump is continuous, integrates to one and stays below 2 / (h u). Phi_h
/// and Phi_h' are the closed-form integrals with Phi_h(0) = Phi_h'(0) = 0.
class ThetaFamily {
 public:
  explicit ThetaFamily(int h);

  int index() const noexcept { return h_; }
  double lower() const noexcept { return lower_; }  ///< a_h
  double upper() const noexcept { return upper_; }  ///< a_{h-1}

  double theta(double u) const noexcept;
  double theta_prime(double u) const noexcept;
  double theta_second(double u) const noexcept;

 private:
  double phi(double u) const noexcept;
  double phi_prime(double u) const noexcept;

  int h_;
  double lower_;
  double upper_;
  double phi_at_upper_;
};

struct UniformBound {
  double G = 0.0;
  double bound = 0.0;  ///< G e^{M T}
};

/// G = |x0| + M T sup E[1 + |Y|] + M sqrt(T sup E[(1 + |Y|)^2]).
UniformBound uniform_bound_G(double x0, double M, double horizon, double sup_mean_1_plus_abs_y,
                             double sup_mean_1_plus_abs_y_sq);

/// M1 = M (G e^{MT} + sup E[1 + |Y|] + sqrt(sup E[(1 + |Y|)^2])).
double step_constant_M1(double M, const UniformBound& g, double sup_mean_1_plus_abs_y,
                        double sup_mean_1_plus_abs_y_sq);

struct LevelPairError {
  int level = 0;  ///< coarse level k of the pair (k, k + 1)
  double mesh = 0.0;
  double l1_error = 0.0;  ///< E|X^(k)_T - X^(k+1)_T|
  double l1_se = 0.0;
  double sup_error = 0.0;  ///< E max over level-k points |X^(k) - X^(k+1)|
  double sup_se = 0.0;
};

struct LevelSummary {
  int level = 0;
  double mesh = 0.0;
  double gamma1 = 0.0;         ///< 1 + M mesh
  double max_mean_abs_x = 0.0;  ///< max over grid points of the sample mean of |X^n|
  double max_mean_abs_x_se = 0.0;
};

struct ConvergenceReport {
  std::vector<LevelPairError> pairs;
  std::vector<LevelSummary> levels;
  double slope = 0.0;  ///< least-squares slope of log l1_error against log mesh
  double M = 0.0;
  double horizon = 0.0;
  double sup_mean_1_plus_abs_y = 0.0;
  double sup_mean_1_plus_abs_y_sq = 0.0;
  double G = 0.0;
  double uniform_bound = 0.0;  ///< G e^{MT}
  double M1 = 0.0;
  double gamma2 = 0.0;  ///< (M / 2) sup E[(1 + |Y|)^2]
  std::size_t paths = 0;
  std::uint64_t seed = 0;

  /// Step-one check: every level's max mean |X^n| <= G e^{MT} + 3 SE.
  bool uniform_bound_holds() const noexcept;
};

/// Declared growth constant used by the bounds: the larger of the drift and
/// diffusion constants.
double declared_growth(const TriangularModel& model) noexcept;

/// Runs every path once on the finest level and coarsens its driver to all
/// requested levels, so all levels share one Brownian path. Levels must be
/// strictly increasing with at least two entries.
ConvergenceReport cauchy_errors(const TriangularModel& model, const std::vector<int>& levels,
                                std::size_t paths, std::uint64_t seed, unsigned workers = 0);

struct StepBoundReport {
  int level = 0;
  double mesh = 0.0;
  double empirical = 0.0;  ///< max_k E|X_{k+1} - X_k|, i.e. E|X_t - X_eta(t)| at t = t_{k+1}
  double empirical_se = 0.0;
  double M1 = 0.0;
  double bound = 0.0;  ///< M1 sqrt(mesh)
  bool pass = false;   ///< empirical <= bound + 3 SE
};

StepBoundReport step_bound_check(const TriangularModel& model, const Partition& partition,
                                 std::size_t paths, std::uint64_t seed, unsigned workers = 0);

/// Runs the scheme twice, independently, against one driver grid and returns
/// max over grid points of |X - Z|. The scheme is deterministic, so the value is 0.
double pathwise_uniqueness_check(const TriangularModel& model, const BrownianGrid& grid, double x0);

/// Same driver grid, two initial conditions: max over grid points of the gap.
double initial_condition_gap(const TriangularModel& model, const BrownianGrid& grid, double x0,
                             double z0);

}  // namespace sisde
