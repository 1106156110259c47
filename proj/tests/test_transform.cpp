#include "doctest.h"

#include <cmath>
#include <random>

#include "tailbounds/binomial.hpp"
#include "tailbounds/transform.hpp"

using namespace tailbounds;

namespace {
DiscreteDistribution fair_sign() { return DiscreteDistribution({-1.0, 1.0}, {0.5, 0.5}); }
}  // namespace

TEST_CASE("g_beta pinned values") {
  CHECK(g_beta(fair_sign(), 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-9));
  // any G_beta dominates the exact tail
  CHECK(g_beta(fair_sign(), 1.0, 2.0) >= 0.5 - 1e-12);
  CHECK(g_beta(fair_sign(), 1.0, 4.0) >= 0.5 - 1e-12);
  auto t2 = to_distribution(build_model(2, 1.0));
  CHECK(g_beta(t2, 1.0, 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK_THROWS_AS(g_beta(fair_sign(), 1.0, 0.0), std::domain_error);
  CHECK(g_beta(fair_sign(), -0.5, 2.0) == 1.0);  // vacuous below the mean
}

TEST_CASE("g2_oracle pinned values") {
  auto t2 = to_distribution(build_model(2, 1.0));
  CHECK(g2_oracle(t2, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(g2_oracle(t2, 2.0) == doctest::Approx(0.25).epsilon(1e-13));
  auto t1 = to_distribution(build_model(1, 1.0));
  CHECK(g2_oracle(t1, 0.5) == doctest::Approx(0.8).epsilon(1e-13));
}

TEST_CASE("g_beta(beta=2) matches the exact oracle on random laws") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> ua(-6.0, 6.0), uw(0.05, 1.0), ux(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    int m = 2 + static_cast<int>(rng() % 11);
    std::vector<double> atoms, weights;
    for (int i = 0; i < m; ++i) {
      atoms.push_back(ua(rng));
      weights.push_back(uw(rng));
    }
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    weights.resize(atoms.size());
    double total = stable_sum(weights);
    for (auto& w : weights) w /= total;
    DiscreteDistribution d(atoms, weights);
    double x = d.mean() + ux(rng) * (d.max() - d.mean());
    if (!(x > d.mean())) continue;
    double grid = g_beta(d, x, 2.0);
    double exact = g2_oracle(d, x);
    CHECK(grid == doctest::Approx(exact).epsilon(1e-9));
    // domination of the exact tail
    CHECK(exact >= d.tail(x) - 1e-12);
  }
}

TEST_CASE("chernoff_inf pinned values and convexity residual") {
  auto t1 = to_distribution(build_model(1, 1.0));
  double expected = 2.0 * std::pow(3.0, -0.75);
  CHECK(chernoff_inf(t1, 0.5) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(chernoff_inf(t1, -0.2) == 1.0);
  CHECK(chernoff_inf(t1, 0.0) == 1.0);
  // top-atom limit
  CHECK(chernoff_inf(t1, 1.0) == doctest::Approx(0.5).epsilon(1e-12));

  // residual derivative at the optimum: recompute the tilted mean at the
  // implied h for a few cases
  auto t3 = to_distribution(build_model(3, 0.5));
  for (double x : {0.3, 0.9, 1.7}) {
    double val = chernoff_inf(t3, x);
    CHECK(val > 0.0);
    CHECK(val <= 1.0);
    CHECK(val >= t3.tail(x) - 1e-12);
  }
}

TEST_CASE("G2 improves on Chernoff for binomial laws") {
  for (int n : {1, 2, 4, 8}) {
    for (double s2 : {0.25, 1.0, 2.0}) {
      auto law = to_distribution(build_model(n, s2));
      for (int i = 1; i < 20; ++i) {
        double x = n * i / 20.0;
        if (!(x > law.mean())) continue;
        CHECK(g2_oracle(law, x) <= chernoff_inf(law, x) + 1e-12);
      }
    }
  }
}

TEST_CASE("truncated_poisson") {
  auto d = truncated_poisson(1.0, 1e-12);
  // minimal K = 14: P{eta > 13} ~ 4.5e-12 > 1e-12 >= P{eta > 14} ~ 3.0e-13
  CHECK(d.atoms().size() == 15);
  CHECK(d.atoms().front() == doctest::Approx(-1.0));
  CHECK(d.weights().front() == doctest::Approx(std::exp(-1.0)).epsilon(1e-11));
  CHECK(std::abs(d.mean()) <= 1e-10);

  auto d5 = truncated_poisson(5.0, 1e-12);
  CHECK(std::abs(d5.mean()) <= 1e-10);

  auto tiny = truncated_poisson(1e-8, 1e-12);
  CHECK(tiny.weights().front() == doctest::Approx(1.0).epsilon(1e-7));

  CHECK_THROWS_AS(truncated_poisson(0.0, 1e-12), std::domain_error);
  CHECK_THROWS_AS(truncated_poisson(1.0, 1e-3), std::domain_error);
}

TEST_CASE("poisson_closed_bound pinned values") {
  CHECK(poisson_closed_bound(1.0, 1.0) == doctest::Approx(std::exp(1.0) / 4.0).epsilon(1e-14));
  CHECK(poisson_closed_bound(3.0, 0.0) == 1.0);
  CHECK(poisson_closed_bound(2.0, 2.0) == doctest::Approx(std::exp(2.0) / 16.0).epsilon(1e-14));
}

TEST_CASE("poisson_closed_bound matches Chernoff on the truncated law") {
  for (double lambda : {0.5, 1.0, 2.0, 5.0}) {
    for (double x : {0.5, 1.0, 2.0, 3.0}) {
      // the tilt at the optimum re-weights the deep tail, so cover well
      // past the tilted mean lambda + x
      auto d = truncated_poisson(lambda, 1e-12, 3.0 * (lambda + x) + 20.0);
      CHECK(poisson_closed_bound(lambda, x) == doctest::Approx(chernoff_inf(d, x)).epsilon(1e-6));
    }
  }
}

TEST_CASE("poisson_g2 pinned values and domination") {
  CHECK(poisson_g2(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(poisson_g2(1.0, -1.0) == 1.0);
  CHECK(poisson_g2(1.0, 0.0) == 1.0);
  // dominates the true Poisson tail P{eta >= 2} = 1 - 2/e
  CHECK(poisson_g2(1.0, 1.0) >= 1.0 - 2.0 / std::exp(1.0));
}

TEST_CASE("Poisson G2 dominates binomial G2 at matched lambda") {
  for (int n : {2, 5, 10}) {
    for (double s2 : {0.25, 0.5, 1.0}) {
      auto m = build_model(n, s2);
      auto law = to_distribution(m);
      double lambda = n * s2;
      for (int i = 1; i <= 10; ++i) {
        double x = std::min(n * i / 10.0, m.atoms.back());
        CHECK(g2_closed_form(m, x) <= poisson_g2(lambda, x) + 1e-9);
      }
    }
  }
}
