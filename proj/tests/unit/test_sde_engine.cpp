#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "sisde/errors.hpp"
#include "sisde/parallel.hpp"
#include "sisde/sde_engine.hpp"

using namespace sisde;

namespace {

DriftSpec constant_drift(double c) {
  return DriftSpec{[c](double, double, double) { return c; }, 1.0, 1.0};
}

QuadraticDiffusionSpec quadratic(double alpha, double beta, double scale) {
  QuadraticDiffusionSpec s;
  s.alpha = [alpha](double, double) { return alpha; };
  s.beta = [beta](double, double) { return beta; };
  s.scale = [scale](double, double) { return scale; };
  return s;
}

GreenhalghParams desk_params() {
  return GreenhalghParams{0.01, 0.05, ContactRate{ContactFamily::constant, 0.2, 0.0, 1.0}};
}

TriangularModel desk_model() {
  const CoefficientPair c = greenhalgh_coeffs(desk_params());
  return TriangularModel{c.drift, c.diffusion, SquareRootY{0.01, true}, 30.0, 100.0, 1.0, 0.0};
}

}  // namespace

TEST_CASE("square-root process from zero stays at zero") {
  Rng rng(1);
  const Partition p(1.0, 6);
  const BrownianGrid g = sample_brownian_grid(p, rng);
  for (double y : simulate_Y(0.0, 1.0, p, g.dw1)) CHECK(y == 0.0);
  CHECK_THROWS_AS(simulate_Y(-1.0, 1.0, p, g.dw1), DomainError);
}

TEST_CASE("square-root process is a martingale with variance 2 mu y0 t") {
  const Partition p(1.0, 7);
  struct Acc {
    std::vector<RunningMoments> y;
    void merge(const Acc& o) {
      for (std::size_t k = 0; k < y.size(); ++k) y[k].merge(o.y[k]);
    }
  };
  const Acc acc = reduce_paths(20000, 3, 0, Acc{std::vector<RunningMoments>(p.size())},
                               [&](std::size_t, Rng& rng, Acc& a) {
                                 const BrownianGrid g = sample_brownian_grid(p, rng);
                                 const auto y = simulate_Y(5.0, 0.5, p, g.dw1);
                                 for (std::size_t k = 0; k < y.size(); ++k) a.y[k].add(y[k]);
                               });
  for (const auto& m : acc.y) CHECK(std::abs(m.mean - 5.0) <= 3.0 * m.se_mean() + 1e-12);
  const RunningMoments& last = acc.y.back();
  CHECK(std::abs(last.variance() - 2.0 * 0.5 * 5.0 * 1.0) <= 3.0 * last.se_variance());
}

TEST_CASE("Euler-Peano scheme on trivial coefficients") {
  Rng rng(2);
  const Partition p(1.0, 5);
  const BrownianGrid g = sample_brownian_grid(p, rng);
  const std::vector<double> y(p.size(), 1.0);

  const auto still = euler_peano_path(constant_drift(0), quadratic(0, 1, 0), y, 0.7, p, g.dw2);
  for (double x : still.x) CHECK(x == 0.7);

  for (int level : {0, 3, 9}) {
    const Partition q(1.0, level);
    const BrownianGrid h = sample_brownian_grid(q, rng);
    const std::vector<double> yq(q.size(), 1.0);
    const auto drift = euler_peano_path(constant_drift(1), quadratic(0, 1e6, 0), yq, 1.0, q, h.dw2);
    CHECK(drift.x.back() == 2.0);
  }

  // scale * (-x^2 + beta) = 1 - 1e-12 x^2, so bar_g is 1 up to 1e-12 on the path
  const auto noise = euler_peano_path(constant_drift(0), quadratic(0, 1e12, 1e-12), y, 0.0, p, g.dw2);
  double w = 0.0;
  for (std::size_t k = 0; k < g.dw2.size(); ++k) {
    w += g.dw2[k];
    CHECK(noise.x[k + 1] == doctest::Approx(w).epsilon(1e-10));
  }
}

TEST_CASE("the interpolant reproduces grid values") {
  Rng rng(3);
  const TriangularModel model = desk_model();
  const Partition p(1.0, 6);
  const BrownianGrid g = sample_brownian_grid(p, rng);
  const auto y = simulate_Y(model.y0, 0.01, p, g.dw1);
  const SchemePath s = euler_peano_path(model.drift, model.diffusion, y, model.x0, p, g.dw2);
  for (std::size_t k = 0; k < g.dw2.size(); ++k) {
    CHECK(s.value_at(p.point(k + 1), g.dw2[k]) == s.x[k + 1]);
  }
  CHECK(s.value_at(0.0, 0.0) == model.x0);
}

TEST_CASE("fixed seed gives a bit-identical joint path") {
  const TriangularModel model = desk_model();
  Rng a(10);
  Rng b(10);
  const JointPath x = simulate_triangular(model, Partition(1.0, 8), a);
  const JointPath z = simulate_triangular(model, Partition(1.0, 8), b);
  CHECK(x.x == z.x);
  CHECK(x.y == z.y);
}

TEST_CASE("SIS paths stay near the root interval") {
  TriangularModel model = desk_model();
  model.x0 = 2.0;
  model.horizon = 5.0;
  for (int paths = 0; paths < 50; ++paths) {
    Rng rng = Rng::substream(4, static_cast<std::uint64_t>(paths));
    const JointPath jp = simulate_triangular(model, Partition(5.0, 9), rng);
    for (std::size_t k = 0; k < jp.x.size(); ++k) {
      CHECK(jp.x[k] >= -1.0);
      CHECK(jp.x[k] <= 1.3 * jp.y[k] + 1.0);
    }
  }
}

TEST_CASE("degenerate spec reduces to quadrature") {
  const Partition p(1.0, 8);
  Rng rng(6);
  const BrownianGrid g = sample_brownian_grid(p, rng);
  // alpha = 2 sqrt(y), beta = -y: double root at sqrt(y)
  QuadraticDiffusionSpec spec;
  spec.alpha = [](double, double y) { return 2.0 * std::sqrt(std::max(y, 0.0)); };
  spec.beta = [](double, double y) { return -std::max(y, 0.0); };
  const DriftSpec drift{[](double t, double y, double x) { return std::cos(t) + 0.1 * y - x; }, 2, 2};
  const TriangularModel model{drift, spec, SquareRootY{0.5, true}, 0.3, 4.0, 1.0, 0.0};
  const JointPath jp = simulate_triangular(model, g);
  const auto q = degenerate_solution(drift, spec.alpha, jp.y, 0.3, p);
  for (std::size_t k = 0; k < q.size(); ++k) CHECK(std::abs(jp.x[k] - q[k]) <= 1e-8);
}

TEST_CASE("degenerate quadrature") {
  const Partition p(1.0, 6);
  const std::vector<double> y(p.size(), 1.0);
  const ScalarField alpha = [](double, double) { return 0.0; };
  const auto zero = degenerate_solution(constant_drift(0), alpha, y, 2.5, p);
  for (double x : zero) CHECK(x == 2.5);
  CHECK(degenerate_solution(constant_drift(0.5), alpha, y, 2.0, p).back() == 2.5);

  // left Riemann sums of cos(t) on [0, 1]: error halves with the mesh
  const DriftSpec smooth{[](double t, double, double) { return std::cos(t); }, 1, 1};
  const auto error = [&](int level) {
    const Partition q(1.0, level);
    const std::vector<double> yq(q.size(), 1.0);
    return std::abs(degenerate_solution(smooth, alpha, yq, 0.0, q).back() - std::sin(1.0));
  };
  const double ratio = error(6) / error(7);
  CHECK(ratio > 1.9);
  CHECK(ratio < 2.1);
}

TEST_CASE("two dimensional scheme with zero rates is constant") {
  Rng rng(7);
  const JointPath jp = simulate_full_2d(zero_table(), State2{3, 4}, Partition(1.0, 5), rng);
  for (std::size_t k = 0; k < jp.x.size(); ++k) {
    CHECK(jp.x[k] == 3.0);
    CHECK(jp.y[k] == 4.0);
  }
}

TEST_CASE("covariation of S2 and N equals mu S2") {
  // B symmetric with B B = V gives (B11 + B21) B21 + (B12 + B22) B22 = b + c
  const TransitionTable t = greenhalgh_table(desk_params());
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const double s1 = 200.0 * rng.uniform();
    const double s2 = 200.0 * rng.uniform();
    const CovarianceEntries v = covariance_matrix(t, 0.0, s1, s2);
    const Matrix2 b = sqrt_matrix(v);
    const double cov = (b.m11 + b.m21) * b.m21 + (b.m12 + b.m22) * b.m22;
    CHECK(cov == doctest::Approx(0.01 * s2).epsilon(1e-9).scale(1.0));
    const double w = std::sqrt(v.a * v.c - v.b * v.b);
    const double d2 = v.a + v.c + 2 * w;
    CHECK(v.b * (v.a + v.b + w) + (v.c + w) * (v.b + v.c + w) ==
          doctest::Approx((v.b + v.c) * d2).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("total population laws agree between the two forms") {
  const TransitionTable t = greenhalgh_table(desk_params());
  const Partition p(1.0, 7);
  const std::size_t n = 10000;
  auto full = map_paths<double>(n, 1, 0, [&](std::size_t, Rng& rng) {
    const JointPath jp = simulate_full_2d(t, State2{70, 30}, p, rng);
    return jp.x.back() + jp.y.back();
  });
  auto driving = map_paths<double>(n, 2, 0, [&](std::size_t, Rng& rng) {
    const BrownianGrid g = sample_brownian_grid(p, rng);
    return simulate_Y(100.0, 0.01, p, g.dw1).back();
  });
  std::sort(full.begin(), full.end());
  std::sort(driving.begin(), driving.end());
  // two-sample Kolmogorov-Smirnov statistic
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < n && j < n) {
    const double x = std::min(full[i], driving[j]);
    while (i < n && full[i] <= x) ++i;
    while (j < n && driving[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) - static_cast<double>(j)) / static_cast<double>(n));
  }
  CHECK(d < 1.628 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("ensemble of one path equals that path") {
  const TriangularModel model = desk_model();
  const Partition p(1.0, 5);
  const PathSimulator sim = [&](std::size_t, Rng& rng) { return simulate_triangular(model, p, rng); };
  EnsembleOptions opts;
  opts.paths = 1;
  opts.seed = 17;
  const EnsembleStats s = ensemble(sim, opts);
  Rng rng = Rng::substream(17, 0);
  const JointPath jp = sim(0, rng);
  CHECK(s.x.mean == jp.x);
  CHECK(s.y.mean == jp.y);
  for (double v : s.x.var) CHECK(v == 0.0);
  CHECK(s.times == p.points());
}

TEST_CASE("ensemble statistics do not depend on the worker count") {
  const TriangularModel model = desk_model();
  const Partition p(1.0, 6);
  const PathSimulator sim = [&](std::size_t, Rng& rng) { return simulate_triangular(model, p, rng); };
  EnsembleOptions opts;
  opts.paths = 1500;
  opts.seed = 4;
  opts.workers = 1;
  const EnsembleStats one = ensemble(sim, opts);
  for (unsigned w : {2u, 5u}) {
    opts.workers = w;
    CHECK(ensemble(sim, opts) == one);
  }
}

TEST_CASE("a failing path aborts the ensemble with its index") {
  const TriangularModel model = desk_model();
  const Partition p(1.0, 4);
  const PathSimulator sim = [&](std::size_t i, Rng& rng) {
    if (i == 612) throw NumericalFailure("synthetic", 3);
    return simulate_triangular(model, p, rng);
  };
  EnsembleOptions opts;
  opts.paths = 1000;
  opts.workers = 3;
  try {
    ensemble(sim, opts);
    FAIL("expected a failure");
  } catch (const PathFailure& f) {
    CHECK(f.path() == 612);
  }
}
