#pragma once

#include <array>
#include <functional>
#include <vector>

#include "sisde/random.hpp"

namespace sisde {

/// Population counts of the two compartments. Stored as reals so the same
/// type serves the jump chain and the diffusion approximation.
struct State2 {
  double s1 = 0.0;
  double s2 = 0.0;

  double total() const noexcept { return s1 + s2; }
  bool operator==(const State2&) const = default;
};

/// Rates (per unit time) of the eight non-trivial changes, in table order:
///   1 (-1, 0) d1    2 (+1, 0) b1    3 (0, -1) d2    4 (0, +1) b2
///   5 (-1,+1) m12   6 (+1,-1) m21   7 (-1,-1) m11   8 (+1,+1) m22
struct Rates {
  double d1 = 0.0;
  double b1 = 0.0;
  double d2 = 0.0;
  double b2 = 0.0;
  double m12 = 0.0;
  double m21 = 0.0;
  double m11 = 0.0;
  double m22 = 0.0;

  std::array<double, 8> as_array() const noexcept { return {d1, b1, d2, b2, m12, m21, m11, m22}; }
  double mixing() const noexcept { return m12 + m21 + m11 + m22; }
  double total() const noexcept { return d1 + b1 + d2 + b2 + mixing(); }
};

/// Unit change of (s1, s2) for each table row, in the order of Rates::as_array.
inline constexpr std::array<std::array<int, 2>, 8> kJumpDirections = {{
    {-1, 0}, {1, 0}, {0, -1}, {0, 1}, {-1, 1}, {1, -1}, {-1, -1}, {1, 1}}};

using RateFunction = std::function<Rates(double t, double s1, double s2)>;

struct TransitionTable {
  RateFunction rates;
  double lambda1 = 1.0;  ///< jump amplitude of s1
  double lambda2 = 1.0;  ///< jump amplitude of s2

  /// Evaluates all rates; throws DomainError on non-finite values.
  Rates evaluate(double t, double s1, double s2) const;
};

TransitionTable zero_table();

/// Entries of the symmetric covariance matrix V = [[a, b], [b, c]].
struct CovarianceEntries {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Row-major 2x2 matrix.
struct Matrix2 {
  double m11 = 0.0;
  double m12 = 0.0;
  double m21 = 0.0;
  double m22 = 0.0;
};

std::array<double, 2> drift_from_rates(const Rates& r, double lambda1, double lambda2) noexcept;
/// Throws AssumptionViolation when a rate is negative.
CovarianceEntries covariance_from_rates(const Rates& r, double lambda1, double lambda2);

std::array<double, 2> drift_vector(const TransitionTable& table, double t, double s1, double s2);

/// Throws AssumptionViolation when a rate is negative.
CovarianceEntries covariance_matrix(const TransitionTable& table, double t, double s1, double s2);

/// Symmetric square root B = (1/d) [[a + w, b], [b, c + w]] with w = sqrt(ac - b^2)
/// and d = sqrt(a + c + 2w). Returns the zero matrix for V = 0 and throws
/// DegenerateMatrixError when V is not positive semidefinite.
Matrix2 sqrt_matrix(const CovarianceEntries& v);

enum class ContactFamily { constant, affine, saturating };

/// Contact rate lambda(N):
///   constant    l0
///   affine      l0 + l1 N
///   saturating  l0 N / (c + N)
struct ContactRate {
  ContactFamily family = ContactFamily::constant;
  double l0 = 0.0;
  double l1 = 0.0;
  double c = 1.0;

  double operator()(double n) const noexcept;
};

struct GreenhalghParams {
  double mu = 0.0;
  double gamma = 0.0;
  ContactRate contact;

  /// Throws DomainError unless mu > 0, gamma >= 0 and the contact rate is
  /// positive and non-decreasing on sampled population sizes.
  void validate() const;
};

/// The SIS table with demographic births and deaths:
///   d1 = mu S1, b1 = mu N, d2 = mu S2, m12 = lambda(N) S1 S2 / N, m21 = gamma S2,
/// other rates zero and unit jumps. The infection rate is 0 at N = 0.
TransitionTable greenhalgh_table(const GreenhalghParams& p);

/// One step of the fixed-dt chain: selects a single change with probability
/// rate * dt, or no change with the residual probability. Throws StepSizeError
/// when the probabilities sum above one.
State2 jump_step(const TransitionTable& table, State2 state, double t, double dt, Rng& rng);

/// Iterates jump_step on [0, horizon]; returns round(horizon / dt) + 1 states.
std::vector<State2> simulate_jump_chain(const TransitionTable& table, State2 state0, double dt,
                                        double horizon, Rng& rng);

}  // namespace sisde
