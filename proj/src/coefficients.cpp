#include "sisde/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include "sisde/errors.hpp"

namespace sisde {

Roots roots(const QuadraticDiffusionSpec& spec, double t, double y) {
  const double alpha = spec.alpha(t, y);
  const double beta = spec.beta ? spec.beta(t, y) : 0.0;
  double discriminant = alpha * alpha + 4.0 * beta;
  // a double root computed as alpha^2 - 4|beta| can round a few ulps below zero
  if (discriminant < 0.0 && discriminant >= -1e-14 * (alpha * alpha + 4.0 * std::abs(beta))) {
    discriminant = 0.0;
  }
  if (!(discriminant >= 0.0)) {
    throw RootConditionError("alpha^2 + 4 beta = " + std::to_string(discriminant) +
                             " < 0 at y = " + std::to_string(y));
  }
  const double root = std::sqrt(discriminant);
  return {(alpha - root) / 2.0, (alpha + root) / 2.0};
}

double bar_g(const QuadraticDiffusionSpec& spec, double t, double y, double x) {
  const Roots r = roots(spec, t, y);
  if (!(x > r.lower && x < r.upper)) return 0.0;
  // factored form (x - r1)(r2 - x) is nonnegative inside and vanishes at the roots
  return std::sqrt(spec.scale_at(t, y) * (x - r.lower) * (r.upper - x));
}

double bar_a(const DriftSpec& drift, const QuadraticDiffusionSpec& spec, double t, double y,
             double x) {
  const Roots r = roots(spec, t, y);
  return drift.a(t, y, std::clamp(x, r.lower, r.upper));
}

double peak_bar_g(const QuadraticDiffusionSpec& spec, double t, double y) {
  const Roots r = roots(spec, t, y);
  const double half_width = (r.upper - r.lower) / 2.0;
  return std::sqrt(spec.scale_at(t, y)) * half_width;
}

CoefficientPair greenhalgh_coeffs(const GreenhalghParams& p, const DeclaredConstants& declared) {
  p.validate();
  const double removal = p.mu + p.gamma;
  const ContactRate contact = p.contact;

  DriftSpec drift;
  drift.growth_M = declared.M;
  drift.lipschitz_L = declared.L;
  drift.a = [contact, removal](double, double y, double x) {
    if (y <= 0.0) return 0.0;
    return contact(y) * x * (y - x) / y - removal * x;
  };

  QuadraticDiffusionSpec diffusion;
  diffusion.growth_M = declared.M;
  diffusion.holder_H = declared.H;
  diffusion.alpha = [contact, removal](double, double y) {
    if (y <= 0.0) return 0.0;
    const double lambda = contact(y);
    return y * (lambda + removal) / lambda;
  };
  diffusion.beta = [](double, double) { return 0.0; };
  diffusion.scale = [contact](double, double y) {
    if (y <= 0.0) return 1.0;
    return contact(y) / y;
  };
  return {std::move(drift), std::move(diffusion)};
}

AssumptionReport validate_assumptions(const DriftSpec& drift, const QuadraticDiffusionSpec& spec,
                                      const DomainBox& box, std::size_t n, Rng& rng) {
  if (n < 2) throw DomainError("validate_assumptions needs at least 2 samples");
  if (!(box.y_max >= box.y_min) || !(box.x_max >= box.x_min)) {
    throw DomainError("empty validation box");
  }
  const double y_width = box.y_max - box.y_min;
  const double x_width = box.x_max - box.x_min;
  auto draw = [&rng](double lo, double width) { return lo + width * rng.uniform(); };
  auto perturb = [&](double v, double lo, double width) {
    const double size = width * std::pow(10.0, -8.0 * rng.uniform());
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return std::clamp(v + sign * size, lo, lo + width);
  };

  AssumptionReport report;
  report.samples = n;
  const double t = box.t;
  for (std::size_t i = 0; i < n; ++i) {
    const double y1 = draw(box.y_min, y_width);
    const double x1 = draw(box.x_min, x_width);
    double y2 = 0.0;
    double x2 = 0.0;
    if (i % 2 == 0) {
      y2 = draw(box.y_min, y_width);
      x2 = draw(box.x_min, x_width);
    } else {
      y2 = rng.uniform() < 0.5 ? y1 : perturb(y1, box.y_min, y_width);
      x2 = perturb(x1, box.x_min, x_width);
    }

    const double g1 = bar_g(spec, t, y1, x1);
    const double g2 = bar_g(spec, t, y2, x2);
    const double a1 = bar_a(drift, spec, t, y1, x1);
    const double a2 = bar_a(drift, spec, t, y2, x2);
    const double dy = std::abs(y1 - y2);
    const double dx = std::abs(x1 - x2);
    if (dy + dx > 0.0) {
      report.holder_estimate =
          std::max(report.holder_estimate, std::abs(g1 - g2) / (std::sqrt(dy) + std::sqrt(dx)));
      report.lipschitz_estimate = std::max(report.lipschitz_estimate, std::abs(a1 - a2) / (dy + dx));
    }
    report.drift_growth_estimate =
        std::max(report.drift_growth_estimate, std::abs(a1) / (1.0 + std::abs(y1) + std::abs(x1)));
    const double alpha = std::abs(spec.alpha(t, y1));
    const double beta = spec.beta ? std::abs(spec.beta(t, y1)) : 0.0;
    const double peak = peak_bar_g(spec, t, y1);
    report.diffusion_growth_estimate = std::max(report.diffusion_growth_estimate,
                                                std::max({alpha, beta, peak}) / (1.0 + std::abs(y1)));
  }
  report.holder_flag = report.holder_estimate > spec.holder_H;
  report.lipschitz_flag = report.lipschitz_estimate > drift.lipschitz_L;
  report.drift_growth_flag = report.drift_growth_estimate > drift.growth_M;
  report.diffusion_growth_flag = report.diffusion_growth_estimate > spec.growth_M;
  return report;
}

}  // namespace sisde
