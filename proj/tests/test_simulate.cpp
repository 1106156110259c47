#include "doctest.h"

#include <cmath>

#include "tailbounds/report_io.hpp"
#include "tailbounds/simulate.hpp"

using namespace tailbounds;

TEST_CASE("two_point constructors") {
  auto fair = two_point(1.0);
  CHECK(fair.atoms()[0] == -1.0);
  CHECK(fair.atoms()[1] == 1.0);
  CHECK(fair.weights()[0] == doctest::Approx(0.5));

  auto quarter = two_point(0.25);
  CHECK(quarter.atoms()[0] == doctest::Approx(-0.25));
  CHECK(quarter.weights()[0] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(quarter.weights()[1] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(quarter.mean() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(quarter.variance() == doctest::Approx(0.25).epsilon(1e-13));
  // exact skewness pins the 1/sigma - sigma sign convention
  CHECK(quarter.skewness() == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("three_point constructors") {
  auto d = three_point(1.0, 0.25);
  CHECK(d.variance() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d.skewness() == doctest::Approx(0.0));
  CHECK(d.kurtosis() == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(lemma_variance_cap_kurt(d));

  auto degenerate = three_point(1.0, 0.5);
  CHECK(degenerate.size() == 2);
  CHECK(degenerate.kurtosis() == doctest::Approx(1.0).epsilon(1e-13));

  CHECK_THROWS_AS(three_point(1.5, 0.25), std::domain_error);
  CHECK_THROWS_AS(three_point(0.5, 0.6), std::domain_error);
}

TEST_CASE("constructor moments match advertised values") {
  for (double s2 : {0.1, 0.5, 1.0, 3.0}) {
    auto d = two_point(s2);
    CHECK(std::abs(d.mean()) <= 1e-12);
    CHECK(d.variance() == doctest::Approx(s2).epsilon(1e-12));
    CHECK(d.skewness() == doctest::Approx(skewness_of_bernoulli(s2)).epsilon(1e-12));
    CHECK(d.kurtosis() == doctest::Approx(kurtosis_of_bernoulli(s2)).epsilon(1e-12));
  }
}

TEST_CASE("simulate_tail pinned estimate and error paths") {
  SimSpec spec;
  spec.n = 2;
  spec.step_law = two_point(1.0);
  spec.samples = 1000000;
  spec.seed = 20240701;
  auto t = simulate_tail(spec, 2.0);
  // exact tail P{T_2 = 2} = 0.25
  CHECK(std::abs(t.estimate - 0.25) <= 3.0 * t.stderr_est);
  CHECK(t.stderr_est == doctest::Approx(std::sqrt(t.estimate * (1 - t.estimate) / 1e6)));

  auto all = simulate_tail(spec, -4.0);
  CHECK(all.estimate == 1.0);

  spec.samples = 0;
  CHECK_THROWS_AS(simulate_tail(spec, 1.0), std::domain_error);
}

TEST_CASE("simulate_tail is reproducible bit-for-bit") {
  SimSpec spec;
  spec.n = 3;
  spec.step_law = two_point(0.5);
  spec.samples = 200000;
  spec.seed = 99;
  auto a = simulate_tail(spec, 1.0);
  auto b = simulate_tail(spec, 1.0);
  CHECK(a.estimate == b.estimate);
  CHECK(a.stderr_est == b.stderr_est);
}

TEST_CASE("maximal dominates terminal on the same seed") {
  SimSpec spec;
  spec.n = 5;
  spec.step_law = two_point(1.0);
  spec.samples = 200000;
  spec.seed = 7;
  auto terminal = simulate_tail(spec, 2.0);
  spec.maximal = true;
  auto maximal = simulate_tail(spec, 2.0);
  CHECK(maximal.estimate >= terminal.estimate);
}

TEST_CASE("empirical tail approaches the extremal survival at atoms") {
  SimSpec spec;
  spec.n = 2;
  spec.step_law = two_point(0.5);
  spec.samples = 2000000;
  spec.seed = 31337;
  auto m = build_model(2, 0.5);
  for (int s = 1; s <= 2; ++s) {
    // threshold a hair below the atom: the float atom can land just above
    // the exactly-representable simulated sums
    auto t = simulate_tail(spec, m.atoms[s] - 1e-9);
    CHECK(std::abs(t.estimate - m.survival[s]) <= 4.0 * t.stderr_est + 1e-9);
  }
}

TEST_CASE("adapted example stays within its variance budget") {
  SimSpec spec;
  spec.n = 6;
  spec.adapted = true;
  spec.samples = 500000;
  spec.seed = 404;
  auto mc = adapted_example_constraints(spec.n);
  for (double x : {1.0, 2.0, 3.0}) {
    auto report = bound_report(mc, x);
    auto tail = simulate_tail(spec, x);
    auto verdict = verify_bound(report, tail);
    CHECK(verdict.pass);
  }
}

TEST_CASE("verify_bound pinned margins and failure modes") {
  auto mc = MomentConstraints::uniform(2, 1.0, -kInf, kInf);
  auto report = bound_report(mc, 1.0);
  SimSpec spec;
  spec.n = 2;
  spec.step_law = two_point(1.0);
  spec.samples = 1000000;
  spec.seed = 5;
  auto tail = simulate_tail(spec, 1.0);
  auto v = verify_bound(report, tail);
  CHECK(v.pass);
  // exact tail P{T_2 >= 1} = 0.25; g2 margin about 2/3 - 0.25
  CHECK(v.margins[0].margin == doctest::Approx(2.0 / 3.0 - 0.25).epsilon(0.01));

  // vacuous bound passes anything
  BoundReport vac = report;
  vac.g2 = vac.hoeffding = vac.chernoff_check = 1.0;
  CHECK(verify_bound(vac, tail).pass);

  // broken zero bound fails
  BoundReport broken = report;
  broken.g2 = 0.0;
  CHECK_FALSE(verify_bound(broken, tail).pass);

  EmpiricalTail wrong = tail;
  wrong.x = 2.0;
  CHECK_THROWS_AS(verify_bound(report, wrong), std::domain_error);
}

TEST_CASE("verdict json rendering") {
  auto mc = MomentConstraints::uniform(2, 1.0, -kInf, kInf);
  auto report = bound_report(mc, 1.0);
  SimSpec spec;
  spec.n = 2;
  spec.step_law = two_point(1.0);
  spec.samples = 10000;
  spec.seed = 1;
  auto v = verify_bound(report, simulate_tail(spec, 1.0));
  std::string j = render_verdict_json(v);
  CHECK(j.find("\"pass\":true") != std::string::npos);
  CHECK(j.find("\"margins\":[") != std::string::npos);
}
