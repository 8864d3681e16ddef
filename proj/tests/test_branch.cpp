#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kirchhoff/branch.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>

using namespace kirchhoff;

namespace {

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

ProblemParams pure_problem(int n, const char* p, double a = 1.0, double b = 1.0) {
  return ProblemParams(a, b, n, NonlinearityParams::pure(Exponent::parse(p)));
}

// Curves shared by several cases; traced once.
const MassCurve& curve_n3() {
  static const MassCurve c = trace_branch(pure_problem(3, "4"), 1e-2, 1e2, 24);
  return c;
}

const MassCurve& curve_n5() {
  static const MassCurve c = trace_branch(pure_problem(5, "3"), 1e-16, 1e-7, 24);
  return c;
}

}  // namespace

TEST_CASE("tag_roots") {
  const auto one = tag_roots(scaling_roots(1, 1, 0.3, 3), 3);
  REQUIRE(one.size() == 1);
  CHECK(one[0].first == Family::Only);
  const auto four = tag_roots(scaling_roots(1, 1, 0.3, 4), 4);
  REQUIRE(four.size() == 1);
  CHECK(four[0].first == Family::Only);
  const auto two = tag_roots(scaling_roots(1, 1, 0.1, 5), 5);
  REQUIRE(two.size() == 2);
  CHECK(two[0].first == Family::Lower);
  CHECK(two[1].first == Family::Upper);
  CHECK(two[0].second < two[1].second);
  const auto deg = tag_roots(scaling_roots(1, 1, critical_gradient(1, 1, 5), 5), 5);
  REQUIRE(deg.size() == 2);
  CHECK(deg[0].second == deg[1].second);
  CHECK(tag_roots(scaling_roots(1, 1, 1.0, 5), 5).empty());
}

TEST_CASE("serial and parallel sweeps agree exactly") {
  const auto pp = pure_problem(3, "10/3");
  const auto grid = log_grid(1e-2, 1e2, 12);
  const auto s = evaluate_branch_points(pp, grid, {}, ExecutionPolicy::Serial);
  const auto p = evaluate_branch_points(pp, grid, {}, ExecutionPolicy::Parallel);
  REQUIRE(s.size() == p.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].lambda == grid[i]);
    CHECK(p[i].lambda == grid[i]);
    REQUIRE(s[i].samples.size() == p[i].samples.size());
    for (std::size_t k = 0; k < s[i].samples.size(); ++k) {
      CHECK(s[i].samples[k].mass == p[i].samples[k].mass);
      CHECK(s[i].samples[k].t == p[i].samples[k].t);
      CHECK(s[i].samples[k].residual == p[i].samples[k].residual);
    }
  }
}

TEST_CASE("a failing point does not poison the sweep") {
  const auto pp = pure_problem(3, "4");
  ShootConfig cfg;
  cfg.amp_hi_factor = 1.0;
  const auto pts = evaluate_branch_points(pp, log_grid(0.1, 10, 4), cfg, ExecutionPolicy::Parallel);
  REQUIRE(pts.size() == 4);
  for (const auto& p : pts) {
    CHECK_FALSE(p.ok());
    CHECK(p.samples.empty());
  }
}

TEST_CASE("sample norms follow the scaling identities") {
  for (const auto* c : {&curve_n3(), &curve_n5()}) {
    REQUIRE_FALSE(c->samples.empty());
    for (const auto& s : c->samples) {
      const int n = c->n;
      REQUIRE(rel(s.mass, std::pow(s.t, -n) * s.v_l2sq) < 1e-12);
      REQUIRE(rel(s.gradsq, std::pow(s.t, 2.0 - n) * s.v_gradsq) < 1e-12);
      REQUIRE(std::abs(fibering_value(1.0, 1.0, s.v_gradsq, n, s.t)) < 1e-12);
      REQUIRE(s.residual < 1e-5);
    }
  }
}

TEST_CASE("samples are sorted by family then lambda") {
  const auto& c = curve_n3();
  CHECK(c.families() == std::vector<Family>{Family::Only});
  CHECK(c.samples.size() == 24);
  CHECK_FALSE(c.failure);
  CHECK(std::is_sorted(c.samples.begin(), c.samples.end(),
                       [](const auto& x, const auto& y) { return x.lambda < y.lambda; }));
}

TEST_CASE("lambda* in four dimensions") {
  // gamma(lambda) = lambda |grad U_2|^2, so lambda* = a / (b |grad U_2|^2).
  const auto pp = pure_problem(4, "3");
  const double expected = 1.0 / oracle::frozen(4, 2.0).gradsq;
  const auto star = detect_lambda_star(pp, 1e-4, 1e-2);
  CHECK(rel(star.lambda, expected) < 1e-5);
  CHECK(star.lambda_lo < expected * (1 + 1e-8));
  CHECK(star.lambda_hi > expected * (1 - 1e-8));
  CHECK((star.lambda_hi - star.lambda_lo) / star.lambda_lo <= 1e-6);
  CHECK(star.gamma_star == doctest::Approx(1.0));

  const auto pp2 = pure_problem(4, "3", 1.0, 2.0);
  CHECK(rel(detect_lambda_star(pp2, 1e-4, 1e-2).lambda, expected / 2.0) < 1e-5);
}

TEST_CASE("lambda* errors") {
  const auto pp = pure_problem(4, "3");
  CHECK_THROWS_AS(detect_lambda_star(pp, 1e-2, 1e-1), BranchError);
  try {
    detect_lambda_star(pp, 1e-2, 1e-1);
  } catch (const BranchError& e) {
    CHECK(e.kind() == BranchError::Kind::NoCrossing);
  }
  try {
    detect_lambda_star(pure_problem(3, "4"), 1e-2, 1e-1);
  } catch (const BranchError& e) {
    CHECK(e.kind() == BranchError::Kind::InvalidArgument);
  }
}

TEST_CASE("trace_branch argument checks") {
  const auto pp = pure_problem(3, "4");
  CHECK_THROWS_AS(trace_branch(pp, 1.0, 0.5, 32), BranchError);
  CHECK_THROWS_AS(trace_branch(pp, 1e-2, 1e2, 8), BranchError);
}

TEST_CASE("four-dimensional curve ends at lambda*") {
  const auto c = trace_branch(pure_problem(4, "3"), 1e-5, 1e-1, 16);
  REQUIRE(c.star);
  const double expected = 1.0 / oracle::frozen(4, 2.0).gradsq;
  CHECK(rel(*c.lambda_star(), expected) < 1e-5);
  for (const auto& s : c.samples) CHECK(s.lambda < c.star->lambda_hi);
  // Refinement carries the mass up towards the divergence at lambda*.
  CHECK(c.samples.back().mass > 1e3 * c.samples.front().mass);
}

TEST_CASE("five-dimensional families") {
  const auto& c = curve_n5();
  REQUIRE(c.star);
  const auto lower = c.family(Family::Lower);
  const auto upper = c.family(Family::Upper);
  REQUIRE(lower.size() == upper.size());
  REQUIRE(lower.size() > 20);
  for (std::size_t i = 0; i < lower.size(); ++i) {
    CHECK(lower[i].lambda == upper[i].lambda);
    CHECK(lower[i].t < upper[i].t);
    CHECK(lower[i].mass > upper[i].mass);
  }
  CHECK(lower.front().mass / upper.front().mass > 100.0);
  // The two families meet at lambda*.
  CHECK(rel(lower.back().mass, upper.back().mass) < 1e-2);
}

TEST_CASE("lower-family slope near zero") {
  const auto pp = pure_problem(5, "3");
  const auto& c = curve_n5();
  const auto lower = c.family(Family::Lower);
  const double slope = loglog_slope(lower, 1e-16, 1e-13);
  // t1 ~ b gamma ~ lambda^{1/2} and |v|^2 ~ lambda^{-1/2}, so mass ~ lambda^{-3}
  CHECK(std::abs(slope + 3.0) < 0.05);
  CHECK(slope <= eta_exponent(pp));
}

TEST_CASE("solve_for_mass") {
  const auto pp = pure_problem(3, "4");
  const auto& c = curve_n3();

  SUBCASE("target above the curve has no solutions") {
    double mx = 0.0;
    for (const auto& s : c.samples) mx = std::max(mx, s.mass);
    const auto r = solve_for_mass(pp, 10 * mx, c);
    CHECK(r.solutions.empty());
    CHECK(r.failures.empty());
  }

  SUBCASE("mass on the curve is recovered") {
    const auto& mid = c.samples[c.samples.size() / 2];
    const double target = 0.5 * (mid.mass + c.samples[c.samples.size() / 2 + 1].mass);
    const auto r = solve_for_mass(pp, target, c);
    REQUIRE(r.solutions.size() == 1);
    const auto& sol = r.solutions[0];
    CHECK(sol.lambda > mid.lambda);
    CHECK(sol.lambda < c.samples[c.samples.size() / 2 + 1].lambda);
    CHECK(std::abs(sol.mass_error) < 1e-6);
    CHECK(sol.residual < 1e-5);
    // Re-verification from the returned profile alone.
    const auto norms = radial_norms(sol.profile, pp.nonlinearity());
    CHECK(rel(norms.l2sq, target) < 1e-5);
    CHECK(kirchhoff_residual(sol.profile, sol.lambda, pp.a(), pp.b(), pp.nonlinearity()) < 1e-5);
  }

  SUBCASE("exact hit on a sample") {
    const auto& s = c.samples[5];
    const auto r = solve_for_mass(pp, s.mass, c);
    REQUIRE(r.solutions.size() >= 1);
    CHECK(rel(r.solutions[0].lambda, s.lambda) < 1e-5);
  }

  CHECK_THROWS_AS(solve_for_mass(pp, -1.0, c), BranchError);
}

TEST_CASE("verify needs both ends") {
  const auto& c = curve_n3();
  const auto pred = *c.endpoint_prediction;
  try {
    verify_asymptotics(c, pred);
    FAIL("expected InsufficientRange");
  } catch (const BranchError& e) {
    CHECK(e.kind() == BranchError::Kind::InsufficientRange);
  }
}

TEST_CASE("loglog slope of an exact power law") {
  std::vector<BranchSample> s;
  for (double l : log_grid(1e-3, 1e3, 20)) {
    BranchSample b;
    b.lambda = l;
    b.mass = 7.0 * std::pow(l, -1.25);
    s.push_back(b);
  }
  CHECK(loglog_slope(s, 1e-3, 1e3) == doctest::Approx(-1.25).epsilon(1e-12));
}
