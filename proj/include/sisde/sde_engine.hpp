#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "sisde/coefficients.hpp"
#include "sisde/drivers.hpp"
#include "sisde/random.hpp"
#include "sisde/stats.hpp"
#include "sisde/transition_model.hpp"

namespace sisde {

/// Euler-Peano approximation X^n on a partition. Coefficients are frozen at the
/// left endpoint of each interval; the frozen values are kept so the
/// continuous-time interpolant can be evaluated between grid points.
struct SchemePath {
  Partition partition;
  double x0 = 0.0;
  std::vector<double> x;      ///< values at grid points, x[0] == x0
  std::vector<double> drift;  ///< bar_a(Y_k, X_k) per interval
  std::vector<double> noise;  ///< bar_g(Y_k, X_k) per interval
  std::size_t exits = 0;      ///< grid points k >= 1 with X_k outside [r1(Y_k), r2(Y_k)]

  /// X_t = X_k + bar_a_k (t - t_k) + bar_g_k (W_t - W_{t_k}) for t in ]t_k, t_{k+1}],
  /// where driver_increment is W_t - W_{t_k}. At grid points with the grid
  /// increment this reproduces x exactly.
  double value_at(double t, double driver_increment) const;
};

/// Two components on one partition driven by one driver grid: (X, Y) for the
/// triangular system or (S1, S2) for the full two dimensional system.
struct JointPath {
  Partition partition;
  std::vector<double> x;
  std::vector<double> y;
  std::size_t exits = 0;   ///< grid points where X left [r1(Y), r2(Y)]
  std::size_t clamps = 0;  ///< states clamped into the admissible region
};

/// dY = sqrt(2 mu Y) dW1, full truncation Euler. With absorption Y stays at 0
/// from the first step at which it reaches a value <= 0.
std::vector<double> simulate_Y(double y0, double mu, const Partition& partition,
                               std::span<const double> dw1, bool absorbing = true);

struct SquareRootY {
  double mu = 0.0;
  bool absorbing = true;
};

/// dY = m(t, Y) dt + sigma(t, Y) dW1 by plain Euler. The caller is responsible
/// for existence of a strong solution with finite second moments.
struct GeneralY {
  ScalarField m;
  ScalarField sigma;
};

using YDynamics = std::variant<SquareRootY, GeneralY>;

std::vector<double> simulate_driving(const YDynamics& dynamics, double y0,
                                     const Partition& partition, std::span<const double> dw1);

SchemePath euler_peano_path(const DriftSpec& drift, const QuadraticDiffusionSpec& diffusion,
                            std::span<const double> y, double x0, const Partition& partition,
                            std::span<const double> dw2);

struct TriangularModel {
  DriftSpec drift;
  QuadraticDiffusionSpec diffusion;
  YDynamics driving;
  double x0 = 0.0;
  double y0 = 0.0;
  double horizon = 1.0;
  double rho = 0.0;  ///< correlation between W1 and W2
};

/// Runs Y on dw1 and X on dw2 of an already correlated grid.
JointPath simulate_triangular(const TriangularModel& model, const BrownianGrid& grid);

/// Samples a grid, correlates it with model.rho and runs the scheme.
JointPath simulate_triangular(const TriangularModel& model, const Partition& partition, Rng& rng);

/// Euler scheme for dS = mu(S) dt + B(S) dW with independent (W1, W2) taken
/// from the grid (its rho is ignored) and B = sqrt_matrix(V). Coefficients are
/// evaluated at the state clamped into the nonnegative quadrant; the state
/// itself is carried unclamped. Throws NumericalFailure with the step index when
/// the covariance has no real square root.
JointPath simulate_full_2d(const TransitionTable& table, State2 s0, const BrownianGrid& grid);
JointPath simulate_full_2d(const TransitionTable& table, State2 s0, const Partition& partition,
                           Rng& rng);

/// Left-endpoint quadrature X_t = x0 + sum a(Y_k, alpha(Y_k) / 2) dt for the
/// zero-discriminant case where bar_g vanishes.
std::vector<double> degenerate_solution(const DriftSpec& drift, const ScalarField& alpha,
                                        std::span<const double> y, double x0,
                                        const Partition& partition);

struct MomentSeries {
  std::vector<double> mean;
  std::vector<double> var;
  std::vector<double> se_mean;
  std::vector<double> se_var;

  bool operator==(const MomentSeries&) const = default;
};

struct EnsembleStats {
  std::vector<double> times;
  MomentSeries x;
  MomentSeries y;
  std::vector<double> quantile_levels;
  std::vector<double> x_quantiles;  ///< at the final time
  std::vector<double> y_quantiles;
  Histogram x_histogram;  ///< at the final time
  Histogram y_histogram;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  std::size_t exits = 0;
  std::size_t clamps = 0;

  bool operator==(const EnsembleStats&) const = default;
};

using PathSimulator = std::function<JointPath(std::size_t path_index, Rng& rng)>;

struct EnsembleOptions {
  std::size_t paths = 1;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::size_t histogram_bins = 20;
  std::vector<double> quantile_levels{0.05, 0.25, 0.5, 0.75, 0.95};
};

/// Runs paths on per-path substreams and reduces them in a fixed order, so the
/// result is bitwise identical for every worker count. Every path must share
/// one partition. A failing path aborts with PathFailure carrying its index.
EnsembleStats ensemble(const PathSimulator& simulate, const EnsembleOptions& options);

}  // namespace sisde
