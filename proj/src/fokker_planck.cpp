#include "sisde/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sisde/errors.hpp"

namespace sisde {

LatticeGeometry unit_lattice(std::size_t n1, std::size_t n2, double lo1, double lo2) {
  return LatticeGeometry{n1, n2, lo1, lo2, 1.0, 1.0};
}

double DensityField::total_mass() const noexcept {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

DensityField empty_field(const LatticeGeometry& geometry) {
  if (geometry.n1 == 0 || geometry.n2 == 0) throw DomainError("lattice must have cells");
  if (!(geometry.h1 > 0.0) || !(geometry.h2 > 0.0)) throw DomainError("lattice spacing must be > 0");
  return DensityField{geometry, std::vector<double>(geometry.cells(), 0.0), 0.0};
}

DensityField point_mass(const LatticeGeometry& geometry, std::size_t i, std::size_t j) {
  DensityField f = empty_field(geometry);
  if (i >= geometry.n1 || j >= geometry.n2) throw DomainError("point mass outside the lattice");
  f.mass[geometry.index(i, j)] = 1.0;
  return f;
}

DensityField master_step(const DensityField& field, const TransitionTable& table, double t,
                         double dt) {
  const LatticeGeometry& g = field.geometry;
  if (g.h1 != 1.0 || g.h2 != 1.0 || table.lambda1 != 1.0 || table.lambda2 != 1.0) {
    throw DomainError("master_step needs unit jumps on a unit lattice");
  }
  if (!(dt > 0.0)) throw DomainError("master_step needs dt > 0");

  DensityField out = empty_field(g);
  out.boundary_flux = field.boundary_flux;
  for (std::size_t i = 0; i < g.n1; ++i) {
    for (std::size_t j = 0; j < g.n2; ++j) {
      const double m = field.at(i, j);
      if (m == 0.0) continue;
      const auto rates = table.evaluate(t, g.x1(i), g.x2(j)).as_array();
      double leave = 0.0;
      for (double r : rates) {
        if (r < 0.0) throw AssumptionViolation("negative transition rate on the lattice");
        leave += r * dt;
      }
      if (leave > 1.0 + 1e-12) throw StepSizeError("jump probabilities sum above one");
      out.mass[g.index(i, j)] += m * (1.0 - leave);
      for (std::size_t k = 0; k < rates.size(); ++k) {
        if (rates[k] == 0.0) continue;
        const double moved = m * rates[k] * dt;
        const auto ti = static_cast<std::ptrdiff_t>(i) + kJumpDirections[k][0];
        const auto tj = static_cast<std::ptrdiff_t>(j) + kJumpDirections[k][1];
        if (ti < 0 || tj < 0 || ti >= static_cast<std::ptrdiff_t>(g.n1) ||
            tj >= static_cast<std::ptrdiff_t>(g.n2)) {
          out.boundary_flux += moved;
        } else {
          out.mass[g.index(static_cast<std::size_t>(ti), static_cast<std::size_t>(tj))] += moved;
        }
      }
    }
  }
  return out;
}

CoefficientField constant_coefficients(const LatticeGeometry& geometry, double mu1, double mu2,
                                       double v11, double v12, double v22) {
  const std::size_t n = geometry.cells();
  return CoefficientField{geometry,
                          std::vector<double>(n, mu1),
                          std::vector<double>(n, mu2),
                          std::vector<double>(n, v11),
                          std::vector<double>(n, v12),
                          std::vector<double>(n, v22)};
}

CoefficientField sample_coefficients(const LatticeGeometry& geometry, const TransitionTable& table,
                                     double t) {
  CoefficientField c = constant_coefficients(geometry, 0.0, 0.0, 0.0, 0.0, 0.0);
  for (std::size_t i = 0; i < geometry.n1; ++i) {
    for (std::size_t j = 0; j < geometry.n2; ++j) {
      const double s1 = std::max(geometry.x1(i), 0.0);
      const double s2 = std::max(geometry.x2(j), 0.0);
      const std::size_t k = geometry.index(i, j);
      const auto mu = drift_vector(table, t, s1, s2);
      const auto v = covariance_matrix(table, t, s1, s2);
      c.mu1[k] = mu[0];
      c.mu2[k] = mu[1];
      c.v11[k] = v.a;
      c.v12[k] = v.b;
      c.v22[k] = v.c;
    }
  }
  return c;
}

double fp_stable_step(const CoefficientField& c) {
  const LatticeGeometry& g = c.geometry;
  double rate = 0.0;
  for (std::size_t k = 0; k < g.cells(); ++k) {
    rate = std::max(rate, c.v11[k] / (g.h1 * g.h1) + c.v22[k] / (g.h2 * g.h2) +
                              std::abs(c.v12[k]) / (g.h1 * g.h2) + std::abs(c.mu1[k]) / g.h1 +
                              std::abs(c.mu2[k]) / g.h2);
  }
  return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

FpStepResult fp_step(const DensityField& field, const CoefficientField& c, double dt) {
  const LatticeGeometry& g = field.geometry;
  if (!(g == c.geometry)) throw DomainError("coefficient field geometry differs from the density");
  if (!(dt >= 0.0)) throw DomainError("fp_step needs dt >= 0");
  if (dt > fp_stable_step(c) * (1.0 + 1e-12)) throw StepSizeError("fp_step above the stability bound");

  const std::size_t n1 = g.n1;
  const std::size_t n2 = g.n2;
  const auto p = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
    if (i < 0 || j < 0 || i >= static_cast<std::ptrdiff_t>(n1) || j >= static_cast<std::ptrdiff_t>(n2)) {
      return 0.0;
    }
    return field.mass[g.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j))];
  };
  const auto coef = [&](const std::vector<double>& v, std::ptrdiff_t i, std::ptrdiff_t j) {
    if (i < 0 || j < 0 || i >= static_cast<std::ptrdiff_t>(n1) || j >= static_cast<std::ptrdiff_t>(n2)) {
      return 0.0;
    }
    return v[g.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j))];
  };
  // V12 p, the quantity differentiated by the mixed term
  const auto q = [&](std::ptrdiff_t i, std::ptrdiff_t j) { return coef(c.v12, i, j) * p(i, j); };

  // flux through the face between (i, j) and (i + 1, j)
  const auto flux1 = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
    const double adv = std::max(coef(c.mu1, i, j), 0.0) * p(i, j) +
                       std::min(coef(c.mu1, i + 1, j), 0.0) * p(i + 1, j);
    const double diag = -0.5 * (coef(c.v11, i + 1, j) * p(i + 1, j) - coef(c.v11, i, j) * p(i, j)) / g.h1;
    const double cross = -0.5 * 0.5 *
                         ((q(i, j + 1) - q(i, j - 1)) + (q(i + 1, j + 1) - q(i + 1, j - 1))) /
                         (2.0 * g.h2);
    return adv + diag + cross;
  };
  const auto flux2 = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
    const double adv = std::max(coef(c.mu2, i, j), 0.0) * p(i, j) +
                       std::min(coef(c.mu2, i, j + 1), 0.0) * p(i, j + 1);
    const double diag = -0.5 * (coef(c.v22, i, j + 1) * p(i, j + 1) - coef(c.v22, i, j) * p(i, j)) / g.h2;
    const double cross = -0.5 * 0.5 *
                         ((q(i + 1, j) - q(i - 1, j)) + (q(i + 1, j + 1) - q(i - 1, j + 1))) /
                         (2.0 * g.h1);
    return adv + diag + cross;
  };

  // Face fluxes once each, so the update telescopes exactly.
  std::vector<double> f1((n1 + 1) * n2, 0.0);
  std::vector<double> f2(n1 * (n2 + 1), 0.0);
  for (std::size_t i = 0; i + 1 < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      f1[(i + 1) * n2 + j] = flux1(static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j));
    }
  }
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j + 1 < n2; ++j) {
      f2[i * (n2 + 1) + j + 1] = flux2(static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j));
    }
  }

  FpStepResult out{empty_field(g), std::nullopt};
  out.field.boundary_flux = field.boundary_flux;
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const double div = (f1[(i + 1) * n2 + j] - f1[i * n2 + j]) / g.h1 +
                         (f2[i * (n2 + 1) + j + 1] - f2[i * (n2 + 1) + j]) / g.h2;
      const double v = field.mass[g.index(i, j)] - dt * div;
      out.field.mass[g.index(i, j)] = v;
      if (v < 0.0 && !out.first_negative) out.first_negative = std::make_pair(i, j);
    }
  }
  return out;
}

DensityField density_from_samples(const LatticeGeometry& geometry, std::span<const double> x1,
                                  std::span<const double> x2) {
  if (x1.size() != x2.size()) throw DomainError("sample components differ in length");
  if (x1.empty()) throw DomainError("density_from_samples needs samples");
  DensityField f = empty_field(geometry);
  const double w = 1.0 / static_cast<double>(x1.size());
  for (std::size_t k = 0; k < x1.size(); ++k) {
    const double i = std::round((x1[k] - geometry.origin1) / geometry.h1);
    const double j = std::round((x2[k] - geometry.origin2) / geometry.h2);
    if (i < 0.0 || j < 0.0 || i >= static_cast<double>(geometry.n1) ||
        j >= static_cast<double>(geometry.n2) || std::isnan(i) || std::isnan(j)) {
      f.boundary_flux += w;
      continue;
    }
    f.mass[geometry.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j))] += w;
  }
  return f;
}

double compare_density(const DensityField& a, const DensityField& b) {
  if (!(a.geometry == b.geometry)) throw DomainError("density geometries differ");
  return l1_distance(a.mass, b.mass);
}

std::vector<double> total_marginal(const DensityField& field) {
  const LatticeGeometry& g = field.geometry;
  if (g.h1 != 1.0 || g.h2 != 1.0) throw DomainError("total_marginal needs a unit lattice");
  std::vector<double> out(g.n1 + g.n2 - 1, 0.0);
  for (std::size_t i = 0; i < g.n1; ++i) {
    for (std::size_t j = 0; j < g.n2; ++j) out[i + j] += field.at(i, j);
  }
  return out;
}

std::vector<double> integer_histogram(std::span<const double> samples, double n_lo,
                                      std::size_t bins) {
  if (samples.empty()) throw DomainError("integer_histogram needs samples");
  std::vector<double> out(bins, 0.0);
  const double w = 1.0 / static_cast<double>(samples.size());
  for (double s : samples) {
    const double k = std::round(s - n_lo);
    if (k >= 0.0 && k < static_cast<double>(bins)) out[static_cast<std::size_t>(k)] += w;
  }
  return out;
}

double l1_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("mass vectors differ in length");
  double sp = 0.0;
  double sq = 0.0;
  for (double v : p) sp += v;
  for (double v : q) sq += v;
  if (!(sp > 0.0) || !(sq > 0.0)) throw DomainError("cannot normalise a field without mass");
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) d += std::abs(p[k] / sp - q[k] / sq);
  return d;
}

}  // namespace sisde
