#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sisde/transition_model.hpp"

namespace sisde {

/// Cell centres x1 = origin1 + i h1, x2 = origin2 + j h2 for i < n1, j < n2.
struct LatticeGeometry {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double origin1 = 0.0;
  double origin2 = 0.0;
  double h1 = 1.0;
  double h2 = 1.0;

  std::size_t cells() const noexcept { return n1 * n2; }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * n2 + j; }
  double x1(std::size_t i) const noexcept { return origin1 + static_cast<double>(i) * h1; }
  double x2(std::size_t j) const noexcept { return origin2 + static_cast<double>(j) * h2; }

  bool operator==(const LatticeGeometry&) const = default;
};

/// Unit spacing lattice covering s1 in [lo1, lo1 + n1), s2 in [lo2, lo2 + n2).
LatticeGeometry unit_lattice(std::size_t n1, std::size_t n2, double lo1 = 0.0, double lo2 = 0.0);

struct DensityField {
  LatticeGeometry geometry;
  std::vector<double> mass;    ///< probability per cell, row-major in i
  double boundary_flux = 0.0;  ///< cumulative mass pushed off the lattice

  double at(std::size_t i, std::size_t j) const noexcept { return mass[geometry.index(i, j)]; }
  double total_mass() const noexcept;
};

DensityField empty_field(const LatticeGeometry& geometry);
DensityField point_mass(const LatticeGeometry& geometry, std::size_t i, std::size_t j);

/// One step of the lattice master equation with unit jumps: every cell keeps
/// 1 - sum p_k of its mass and sends p_k = rate_k dt to its neighbour in
/// direction k. Mass sent off the lattice is added to boundary_flux.
/// Throws StepSizeError when sum p_k > 1 at an occupied cell, DomainError for
/// a non-unit lattice or table and AssumptionViolation for negative rates.
DensityField master_step(const DensityField& field, const TransitionTable& table, double t,
                         double dt);

/// Drift and covariance sampled at cell centres.
struct CoefficientField {
  LatticeGeometry geometry;
  std::vector<double> mu1;
  std::vector<double> mu2;
  std::vector<double> v11;
  std::vector<double> v12;
  std::vector<double> v22;
};

CoefficientField constant_coefficients(const LatticeGeometry& geometry, double mu1, double mu2,
                                       double v11, double v12, double v22);

/// Samples the table's drift and covariance at cell centres clamped into the
/// nonnegative quadrant.
CoefficientField sample_coefficients(const LatticeGeometry& geometry, const TransitionTable& table,
                                     double t);

/// Largest admissible step of fp_step:
///   dt * max over cells (V11/h1^2 + V22/h2^2 + |V12|/(h1 h2) + |mu1|/h1 + |mu2|/h2) <= 1.
/// For pure diffusion with V = s^2 I and h1 = h2 = h this is h^2 / (2 s^2).
double fp_stable_step(const CoefficientField& coefficients);

struct FpStepResult {
  DensityField field;
  std::optional<std::pair<std::size_t, std::size_t>> first_negative;  ///< (i, j) in row-major order
};

/// Explicit conservative update of
///   dp/dt = -sum_i d(mu_i p)/dx_i + 1/2 sum_ij d^2(V_ij p)/dx_i dx_j
/// with zero flux through the lattice edge. Drift is upwinded, the diagonal
/// diffusion uses two-point face differences and the mixed term the four-point
/// cross stencil (face averages of central differences, zero beyond the edge).
/// Throws StepSizeError when dt exceeds fp_stable_step.
FpStepResult fp_step(const DensityField& field, const CoefficientField& coefficients, double dt);

/// Nearest-cell histogram of samples, normalised by the sample count. Samples
/// outside the lattice are counted in boundary_flux.
DensityField density_from_samples(const LatticeGeometry& geometry, std::span<const double> x1,
                                  std::span<const double> x2);

/// L1 distance after normalising both fields to unit mass. Throws DomainError
/// when the geometries differ or either field carries no mass.
double compare_density(const DensityField& a, const DensityField& b);

/// Marginal of N = s1 + s2 on a unit lattice: entry k holds the mass at
/// N = origin1 + origin2 + k.
std::vector<double> total_marginal(const DensityField& field);

/// Nearest-integer histogram of samples on n_lo, n_lo + 1, ..., n_lo + bins - 1,
/// normalised by the sample count.
std::vector<double> integer_histogram(std::span<const double> samples, double n_lo,
                                      std::size_t bins);

/// L1 distance of two mass vectors after normalising each to unit mass.
double l1_distance(std::span<const double> p, std::span<const double> q);

}  // namespace sisde
