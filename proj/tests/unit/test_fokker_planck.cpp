#include <cmath>

#include "doctest.h"
#include "sisde/errors.hpp"
#include "sisde/fokker_planck.hpp"
#include "sisde/parallel.hpp"

using namespace sisde;

namespace {

GreenhalghParams desk_params() {
  return GreenhalghParams{0.01, 0.05, ContactRate{ContactFamily::constant, 0.2, 0.0, 1.0}};
}

}  // namespace

TEST_CASE("master step with zero rates leaves the field unchanged") {
  DensityField f = point_mass(unit_lattice(5, 5), 2, 3);
  const DensityField g = master_step(f, zero_table(), 0.0, 0.1);
  CHECK(g.mass == f.mass);
  CHECK(g.boundary_flux == 0.0);
}

TEST_CASE("master step moves mass along a single channel") {
  Rates r;
  r.b1 = 1.0;
  const TransitionTable t{[r](double, double, double) { return r; }, 1.0, 1.0};
  const double dt = 0.01;
  const DensityField g = master_step(point_mass(unit_lattice(4, 4), 1, 1), t, 0.0, dt);
  CHECK(g.at(2, 1) == dt);
  CHECK(g.at(1, 1) == 1.0 - dt);
  CHECK(g.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("master step conserves interior mass") {
  const TransitionTable t = greenhalgh_table(desk_params());
  DensityField f = point_mass(unit_lattice(120, 120), 70, 30);
  for (int k = 0; k < 200; ++k) {
    const double before = f.total_mass();
    f = master_step(f, t, 0.0, 0.01);
    CHECK(std::abs(f.total_mass() - before) <= 1e-14);
  }
  CHECK(f.total_mass() + f.boundary_flux == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.boundary_flux < 1e-30);
}

TEST_CASE("master step guards") {
  const TransitionTable t = greenhalgh_table(desk_params());
  CHECK_THROWS_AS(master_step(point_mass(unit_lattice(120, 120), 50, 50), t, 0.0, 1.0), StepSizeError);
  const LatticeGeometry wide{4, 4, 0, 0, 2.0, 1.0};
  CHECK_THROWS_AS(master_step(point_mass(wide, 1, 1), t, 0.0, 0.01), DomainError);
}

TEST_CASE("master step records mass leaving the lattice") {
  Rates r;
  r.d1 = 1.0;
  const TransitionTable t{[r](double, double, double) { return r; }, 1.0, 1.0};
  const DensityField g = master_step(point_mass(unit_lattice(3, 3), 0, 1), t, 0.0, 0.25);
  CHECK(g.boundary_flux == 0.25);
  CHECK(g.total_mass() + g.boundary_flux == 1.0);
}

TEST_CASE("Fokker-Planck step with zero coefficients is the identity") {
  const LatticeGeometry geom{9, 7, -1.0, 2.0, 0.5, 0.25};
  const DensityField f = point_mass(geom, 4, 3);
  const FpStepResult r = fp_step(f, constant_coefficients(geom, 0, 0, 0, 0, 0), 0.3);
  CHECK(r.field.mass == f.mass);
  CHECK_FALSE(r.first_negative.has_value());
}

TEST_CASE("pure diffusion spreads at rate sigma^2 per axis") {
  const double h = 0.05;
  const LatticeGeometry geom{201, 201, -5.0, -5.0, h, h};
  const double sigma2 = 0.5;
  const CoefficientField c = constant_coefficients(geom, 0, 0, sigma2, 0, sigma2);
  const double dt = 0.9 * fp_stable_step(c);
  CHECK(fp_stable_step(c) == doctest::Approx(h * h / (2 * sigma2)));
  DensityField f = point_mass(geom, 100, 100);
  const int steps = 400;
  for (int k = 0; k < steps; ++k) {
    const double before = f.total_mass();
    FpStepResult r = fp_step(f, c, dt);
    CHECK_FALSE(r.first_negative.has_value());
    f = std::move(r.field);
    CHECK(std::abs(f.total_mass() - before) <= 1e-10);
  }
  const double t = steps * dt;
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < geom.n1; ++i) {
    for (std::size_t j = 0; j < geom.n2; ++j) {
      m1 += f.at(i, j) * geom.x1(i) * geom.x1(i);
      m2 += f.at(i, j) * geom.x2(j) * geom.x2(j);
    }
  }
  CHECK(std::abs(m1 / (sigma2 * t) - 1.0) <= 0.02);
  CHECK(std::abs(m2 / (sigma2 * t) - 1.0) <= 0.02);
}

TEST_CASE("Fokker-Planck drift and cross terms conserve mass") {
  const LatticeGeometry geom{60, 50, 0.0, 0.0, 0.2, 0.3};
  CoefficientField c = constant_coefficients(geom, 0.3, -0.2, 0.4, -0.15, 0.5);
  DensityField f = point_mass(geom, 30, 25);
  const double dt = fp_stable_step(c);
  for (int k = 0; k < 300; ++k) {
    const double before = f.total_mass();
    f = fp_step(f, c, dt).field;
    CHECK(std::abs(f.total_mass() - before) <= 1e-10);
  }
  CHECK_THROWS_AS(fp_step(f, c, 1.01 * dt), StepSizeError);
}

TEST_CASE("Fokker-Planck drift moves the mean") {
  const LatticeGeometry geom{400, 1, 0.0, 0.0, 0.05, 1.0};
  const CoefficientField c = constant_coefficients(geom, 1.0, 0, 0.01, 0, 0);
  DensityField f = point_mass(geom, 50, 0);
  const double dt = 0.5 * fp_stable_step(c);
  const int steps = 200;
  for (int k = 0; k < steps; ++k) f = fp_step(f, c, dt).field;
  double mean = 0.0;
  for (std::size_t i = 0; i < geom.n1; ++i) mean += f.at(i, 0) * geom.x1(i);
  CHECK(mean == doctest::Approx(2.5 + steps * dt).epsilon(1e-9));
}

TEST_CASE("density comparison") {
  const LatticeGeometry geom = unit_lattice(4, 4);
  const DensityField a = point_mass(geom, 1, 1);
  const DensityField b = point_mass(geom, 2, 3);
  CHECK(compare_density(a, a) == 0.0);
  CHECK(compare_density(a, b) == 2.0);
  CHECK_THROWS_AS(compare_density(a, point_mass(unit_lattice(5, 4), 1, 1)), DomainError);
  CHECK_THROWS_AS(compare_density(a, empty_field(geom)), DomainError);
}

TEST_CASE("samples bin to the nearest cell") {
  const LatticeGeometry geom = unit_lattice(3, 3);
  const std::vector<double> x1{0.2, 1.6, 5.0, 2.4};
  const std::vector<double> x2{0.0, 0.4, 1.0, 2.4};
  const DensityField f = density_from_samples(geom, x1, x2);
  CHECK(f.at(0, 0) == 0.25);
  CHECK(f.at(2, 0) == 0.25);
  CHECK(f.at(2, 2) == 0.25);
  CHECK(f.boundary_flux == 0.25);
  const auto marginal = total_marginal(f);
  CHECK(marginal.size() == 5);
  CHECK(marginal[2] == 0.25);
  CHECK(marginal[4] == 0.25);
}

TEST_CASE("master equation density matches jump-chain samples") {
  const TransitionTable t = greenhalgh_table(desk_params());
  const LatticeGeometry geom = unit_lattice(110, 70);
  const double dt = 0.001;
  DensityField f = point_mass(geom, 70, 30);
  for (int k = 0; k < 1000; ++k) f = master_step(f, t, k * dt, dt);
  const auto finals = map_paths<State2>(100000, 21, 0, [&](std::size_t, Rng& rng) {
    return simulate_jump_chain(t, State2{70, 30}, dt, 1.0, rng).back();
  });
  std::vector<double> s1, s2;
  for (const auto& s : finals) {
    s1.push_back(s.s1);
    s2.push_back(s.s2);
  }
  CHECK(compare_density(f, density_from_samples(geom, s1, s2)) <= 0.05);
}
