#pragma once

#include <cstddef>
#include <functional>

#include "sisde/random.hpp"
#include "sisde/transition_model.hpp"

namespace sisde {

using ScalarField = std::function<double(double t, double y)>;
using DriftFunction = std::function<double(double t, double y, double x)>;

/// Diffusion coefficient g(t, y, x) = sqrt(scale(t, y) * (-x^2 + alpha(t, y) x + beta(t, y)))
/// on the root interval, zero outside. scale defaults to 1.
struct QuadraticDiffusionSpec {
  ScalarField alpha;
  ScalarField beta;
  ScalarField scale;
  double growth_M = 1.0;  ///< declared bound |alpha|, |beta| <= M (1 + |y|)
  double holder_H = 1.0;  ///< declared Hoelder-1/2 constant of bar_g

  double scale_at(double t, double y) const { return scale ? scale(t, y) : 1.0; }
};

struct DriftSpec {
  DriftFunction a;
  double growth_M = 1.0;     ///< declared bound |a| <= M (1 + |y| + |x|)
  double lipschitz_L = 1.0;  ///< declared Lipschitz constant in (y, x)
};

struct Roots {
  double lower = 0.0;
  double upper = 0.0;
};

/// Roots of -x^2 + alpha x + beta. Throws RootConditionError when
/// alpha^2 + 4 beta < 0 beyond rounding (1e-14 relative), which counts as a double root.
Roots roots(const QuadraticDiffusionSpec& spec, double t, double y);

/// Truncated diffusion: the square root on the closed root interval, 0 elsewhere.
/// Exactly zero at both roots.
double bar_g(const QuadraticDiffusionSpec& spec, double t, double y, double x);

/// Drift evaluated at x clamped into the root interval.
double bar_a(const DriftSpec& drift, const QuadraticDiffusionSpec& spec, double t, double y,
             double x);

/// max_x bar_g(t, y, x) = sqrt(scale (alpha^2 / 4 + beta)), attained at x = alpha / 2.
double peak_bar_g(const QuadraticDiffusionSpec& spec, double t, double y);

struct DeclaredConstants {
  double M = 2.0;
  double H = 2.0;
  double L = 1.0;
};

struct CoefficientPair {
  DriftSpec drift;
  QuadraticDiffusionSpec diffusion;
};

/// Infected-compartment coefficients driven by the total population y:
///   a(y, x) = lambda(y) x (y - x) / y - (mu + gamma) x
///   scale = lambda(y) / y, alpha = y (lambda(y) + mu + gamma) / lambda(y), beta = 0
/// so the root interval is [0, y (1 + (mu + gamma) / lambda(y))]. For y <= 0 both
/// coefficients vanish.
CoefficientPair greenhalgh_coeffs(const GreenhalghParams& p, const DeclaredConstants& declared = {});

struct DomainBox {
  double y_min = 0.0;
  double y_max = 1.0;
  double x_min = 0.0;
  double x_max = 1.0;
  double t = 0.0;
};

struct AssumptionReport {
  std::size_t samples = 0;
  double holder_estimate = 0.0;            ///< max |dg| / (sqrt|dy| + sqrt|dx|)
  double lipschitz_estimate = 0.0;         ///< max |da| / (|dy| + |dx|)
  double drift_growth_estimate = 0.0;      ///< max |bar_a| / (1 + |y| + |x|)
  double diffusion_growth_estimate = 0.0;  ///< max of |alpha|, |beta|, peak bar_g over (1 + |y|)
  bool holder_flag = false;
  bool lipschitz_flag = false;
  bool drift_growth_flag = false;
  bool diffusion_growth_flag = false;

  bool any_flag() const noexcept {
    return holder_flag || lipschitz_flag || drift_growth_flag || diffusion_growth_flag;
  }
};

/// Empirical audit of the declared growth, Hoelder and Lipschitz constants on
/// random pairs drawn from the box. Half the pairs are global, half are local
/// perturbations with log-uniform size so that the root behaviour is probed.
/// Violations are reported, never thrown.
AssumptionReport validate_assumptions(const DriftSpec& drift, const QuadraticDiffusionSpec& spec,
                                      const DomainBox& box, std::size_t n, Rng& rng);

}  // namespace sisde
