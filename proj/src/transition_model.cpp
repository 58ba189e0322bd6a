#include "sisde/transition_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sisde/errors.hpp"

namespace sisde {

namespace {

constexpr double kProbabilitySlack = 1e-12;

void require_nonnegative(const Rates& r) {
  const auto values = r.as_array();
  static constexpr const char* kNames[] = {"d1", "b1", "d2", "b2", "m12", "m21", "m11", "m22"};
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] < 0.0) {
      throw AssumptionViolation(std::string("negative rate ") + kNames[j] + " = " +
                                std::to_string(values[j]));
    }
  }
}

}  // namespace

Rates TransitionTable::evaluate(double t, double s1, double s2) const {
  if (!rates) throw DomainError("transition table has no rate function");
  const Rates r = rates(t, s1, s2);
  for (double v : r.as_array()) {
    if (!std::isfinite(v)) throw DomainError("rate evaluates to a non-finite value");
  }
  return r;
}

TransitionTable zero_table() {
  return TransitionTable{[](double, double, double) { return Rates{}; }, 1.0, 1.0};
}

std::array<double, 2> drift_from_rates(const Rates& r, double lambda1, double lambda2) noexcept {
  return {(-r.d1 + r.b1 - r.m12 + r.m21 + r.m22 - r.m11) * lambda1,
          (-r.d2 + r.b2 + r.m12 - r.m21 + r.m22 - r.m11) * lambda2};
}

CovarianceEntries covariance_from_rates(const Rates& r, double lambda1, double lambda2) {
  require_nonnegative(r);
  const double ma = r.mixing();
  return {(r.d1 + r.b1 + ma) * lambda1 * lambda1,
          (-r.m12 - r.m21 + r.m22 + r.m11) * lambda1 * lambda2,
          (r.d2 + r.b2 + ma) * lambda2 * lambda2};
}

std::array<double, 2> drift_vector(const TransitionTable& table, double t, double s1, double s2) {
  return drift_from_rates(table.evaluate(t, s1, s2), table.lambda1, table.lambda2);
}

CovarianceEntries covariance_matrix(const TransitionTable& table, double t, double s1, double s2) {
  return covariance_from_rates(table.evaluate(t, s1, s2), table.lambda1, table.lambda2);
}

Matrix2 sqrt_matrix(const CovarianceEntries& v) {
  const double a = v.a;
  const double b = v.b;
  const double c = v.c;
  if (a == 0.0 && b == 0.0 && c == 0.0) return {};
  if (!(a >= 0.0) || !(c >= 0.0)) {
    throw DegenerateMatrixError("covariance has a negative diagonal entry");
  }
  // ac - b^2 with a single rounding; tiny negative values are rounding noise
  double det = std::fma(a, c, -b * b);
  if (det < 0.0) {
    if (det < -1e-12 * std::max(a * c, b * b)) {
      throw DegenerateMatrixError("covariance is not positive semidefinite: ac - b^2 = " +
                                  std::to_string(det));
    }
    det = 0.0;
  }
  const double w = std::sqrt(det);
  const double d = std::sqrt(a + c + 2.0 * w);
  if (d == 0.0) throw DegenerateMatrixError("zero trace with nonzero covariance");
  const double off = b / d;
  return {(a + w) / d, off, off, (c + w) / d};
}

double ContactRate::operator()(double n) const noexcept {
  switch (family) {
    case ContactFamily::constant:
      return l0;
    case ContactFamily::affine:
      return l0 + l1 * n;
    case ContactFamily::saturating:
      return n <= 0.0 ? 0.0 : l0 * n / (c + n);
  }
  return l0;
}

void GreenhalghParams::validate() const {
  if (!(mu > 0.0)) throw DomainError("mu must be positive");
  if (!(gamma >= 0.0)) throw DomainError("gamma must be nonnegative");
  if (contact.family == ContactFamily::saturating && !(contact.c > 0.0)) {
    throw DomainError("saturating contact rate needs c > 0");
  }
  // lambda enters the truncation boundary y (1 + (mu + gamma) / lambda(y)), so
  // it must be strictly positive for N > 0
  double previous = contact(0.0);
  if (!(previous >= 0.0)) throw DomainError("contact rate is negative at N = 0");
  for (int i = 1; i <= 256; ++i) {
    const double n = std::ldexp(1.0, i / 8 - 8) * (1.0 + (i % 8) / 8.0);
    const double value = contact(n);
    if (!(value > 0.0)) throw DomainError("contact rate must be positive for N > 0");
    if (value < previous) throw DomainError("contact rate must be non-decreasing in N");
    previous = value;
  }
}

TransitionTable greenhalgh_table(const GreenhalghParams& p) {
  p.validate();
  TransitionTable table;
  table.lambda1 = 1.0;
  table.lambda2 = 1.0;
  table.rates = [p](double, double s1, double s2) {
    const double n = s1 + s2;
    Rates r;
    r.d1 = p.mu * s1;
    r.b1 = p.mu * n;
    r.d2 = p.mu * s2;
    r.m12 = n > 0.0 ? p.contact(n) * s1 * s2 / n : 0.0;
    r.m21 = p.gamma * s2;
    return r;
  };
  return table;
}

State2 jump_step(const TransitionTable& table, State2 state, double t, double dt, Rng& rng) {
  const Rates r = table.evaluate(t, state.s1, state.s2);
  require_nonnegative(r);
  const auto rates = r.as_array();
  double total = 0.0;
  for (double rate : rates) total += rate * dt;
  if (total > 1.0 + kProbabilitySlack) {
    throw StepSizeError("jump probabilities sum to " + std::to_string(total) +
                        " > 1; reduce dt");
  }
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t j = 0; j < rates.size(); ++j) {
    const double p = rates[j] * dt;
    if (p <= 0.0) continue;
    cumulative += p;
    if (u <= cumulative) {
      state.s1 += kJumpDirections[j][0] * table.lambda1;
      state.s2 += kJumpDirections[j][1] * table.lambda2;
      return state;
    }
  }
  return state;
}

std::vector<State2> simulate_jump_chain(const TransitionTable& table, State2 state0, double dt,
                                        double horizon, Rng& rng) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(horizon >= 0.0)) throw DomainError("horizon must be nonnegative");
  const double ratio = horizon / dt;
  const double steps_real = std::round(ratio);
  if (std::abs(ratio - steps_real) > 1e-9 * std::max(1.0, ratio)) {
    throw DomainError("dt must divide the horizon");
  }
  const auto steps = static_cast<std::size_t>(steps_real);
  std::vector<State2> path;
  path.reserve(steps + 1);
  path.push_back(state0);
  for (std::size_t k = 0; k < steps; ++k) {
    path.push_back(jump_step(table, path.back(), static_cast<double>(k) * dt, dt, rng));
  }
  return path;
}

}  // namespace sisde
