#include <cmath>

#include "doctest.h"
#include "sisde/drivers.hpp"
#include "sisde/errors.hpp"
#include "sisde/stats.hpp"

using namespace sisde;

TEST_CASE("dyadic partitions") {
  const Partition p0 = dyadic_partition(1.0, 0);
  CHECK(p0.points() == std::vector<double>{0.0, 1.0});
  CHECK(p0.mesh() == 1.0);
  const Partition p2 = dyadic_partition(1.0, 2);
  CHECK(p2.points() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(p2.mesh() == 0.25);
  CHECK_THROWS_AS(Partition(0.0, 2), DomainError);
  CHECK_THROWS_AS(Partition(1.0, -1), DomainError);
}

TEST_CASE("coarser partitions nest in finer ones") {
  const Partition coarse(3.7, 3);
  const Partition fine(3.7, 6);
  for (std::size_t i = 0; i < coarse.size(); ++i) CHECK(coarse.point(i) == fine.point(i * 8));
}

TEST_CASE("eta uses half-open intervals") {
  const Partition p(1.0, 2);
  CHECK(p.eta(0.0) == 0.0);
  CHECK(p.eta(0.3) == 0.25);
  CHECK(p.eta(0.5) == 0.25);
  CHECK(p.eta(0.25) == 0.0);
  CHECK(p.eta(1.0) == 0.75);
  CHECK(p.eta_index(0.5) == 1);
  CHECK_THROWS_AS(p.eta(1.5), DomainError);
}

TEST_CASE("Brownian increments have variance mesh") {
  const Partition p(1.0, 2);
  RunningMoments first;
  RunningMoments total;
  Rng rng(31);
  for (int i = 0; i < 100000; ++i) {
    const BrownianGrid g = sample_brownian_grid(p, rng);
    first.add(g.dw1[0]);
    total.add(g.dw2[0] + g.dw2[1] + g.dw2[2] + g.dw2[3]);
  }
  CHECK(std::abs(first.variance() - 0.25) <= 3.0 * first.se_variance());
  CHECK(std::abs(total.variance() - 1.0) <= 3.0 * total.se_variance());
}

TEST_CASE("fixed seed reproduces the grid") {
  Rng a(8);
  Rng b(8);
  const BrownianGrid x = sample_brownian_grid(Partition(1.0, 5), a);
  const BrownianGrid y = sample_brownian_grid(Partition(1.0, 5), b);
  CHECK(x.dw1 == y.dw1);
  CHECK(x.dw2 == y.dw2);
}

TEST_CASE("correlation of the second component") {
  Rng rng(12);
  const BrownianGrid g = sample_brownian_grid(Partition(1.0, 20), rng);
  const BrownianGrid same = correlate(g, 0.0);
  CHECK(same.dw2 == g.dw2);
  const BrownianGrid one = correlate(g, 1.0);
  CHECK(one.dw2 == g.dw1);
  CHECK_THROWS_AS(correlate(g, 1.5), DomainError);

  const BrownianGrid half = correlate(g, 0.5);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < g.dw1.size(); ++i) {
    sxy += g.dw1[i] * half.dw2[i];
    sxx += g.dw1[i] * g.dw1[i];
    syy += half.dw2[i] * half.dw2[i];
  }
  const double r = sxy / std::sqrt(sxx * syy);
  const double se = (1.0 - 0.25) / std::sqrt(static_cast<double>(g.dw1.size()));
  CHECK(std::abs(r - 0.5) <= 3.0 * se);
}

TEST_CASE("coarsening sums pairs and is associative") {
  Rng rng(99);
  const BrownianGrid g = sample_brownian_grid(Partition(2.0, 6), rng);
  const BrownianGrid own = coarsen(g, 6);
  CHECK(own.dw1 == g.dw1);
  const BrownianGrid one = coarsen(g, 5);
  for (std::size_t i = 0; i < one.dw1.size(); ++i) {
    CHECK(one.dw1[i] == g.dw1[2 * i] + g.dw1[2 * i + 1]);
    CHECK(one.dw2[i] == g.dw2[2 * i] + g.dw2[2 * i + 1]);
  }
  for (int k = 0; k <= 6; ++k) {
    for (int j = 0; j <= k; ++j) {
      const BrownianGrid twice = coarsen(coarsen(g, k), j);
      const BrownianGrid once = coarsen(g, j);
      CHECK(twice.dw1 == once.dw1);
      CHECK(twice.dw2 == once.dw2);
      CHECK(twice.partition.level() == j);
    }
  }
  CHECK_THROWS_AS(coarsen(g, 7), DomainError);
}
