#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kirchhoff/scaling.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace kirchhoff;

namespace {

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

Nonlinearity pure(double p) { return Nonlinearity(NonlinearityParams::pure(Exponent(p))); }

}  // namespace

TEST_CASE("zero gradient mass gives t = 1 when a = 1") {
  for (int n = 1; n <= 7; ++n) {
    const auto r = scaling_roots(1, 1, 0, n);
    REQUIRE(r.roots.size() == 1);
    CHECK(r.roots[0] == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("four-dimensional closed form") {
  const auto r = scaling_roots(1, 1, 0.75, 4);
  REQUIRE(r.roots.size() == 1);
  CHECK(r.roots[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.regime == ScalingRegime::FourDim);
  CHECK(scaling_roots(1, 1, 1.0, 4).roots.empty());
  CHECK(scaling_roots(1, 2, 0.6, 4).roots.empty());
}

TEST_CASE("five-dimensional double root") {
  const double gs = 2.0 * std::pow(3.0, -1.5);
  const auto r = scaling_roots(1, 1, gs, 5);
  REQUIRE(r.f_min);
  CHECK(std::abs(*r.f_min) <= 1e-12);
  CHECK(r.degenerate);
  REQUIRE(r.roots.size() == 1);
  CHECK(std::abs(r.roots[0] - 1.0 / std::sqrt(3.0)) < 1e-8);
  // Brute-force scan of f over (0, 2] at step 1e-6: minimum is zero.
  double fmin = 1e300;
  for (int i = 1; i <= 2000000; ++i) fmin = std::min(fmin, fibering_value(1, 1, gs, 5, i * 1e-6));
  CHECK(std::abs(fmin) < 1e-11);
}

TEST_CASE("five-dimensional two roots") {
  const auto r = scaling_roots(1, 1, 0.1, 5);
  REQUIRE(r.roots.size() == 2);
  CHECK(*r.t_star == doctest::Approx(std::cbrt(0.05)).epsilon(1e-14));
  CHECK(r.roots[0] < *r.t_star);
  CHECK(*r.t_star < r.roots[1]);
  CHECK(oracle::scan_root_count(1, 1, 0.1, 5) == 2);
}

TEST_CASE("root residual on random draws") {
  oracle::Draw d(1);
  for (int k = 0; k < 10000; ++k) {
    const int n = d.integer(1, 6);
    const double a = d.log_uniform(1e-2, 1e2), b = d.log_uniform(1e-2, 1e2);
    const double gamma = d.log_uniform(1e-6, 1e6);
    const auto r = scaling_roots(a, b, gamma, n);
    for (double t : r.roots) REQUIRE(std::abs(fibering_value(a, b, gamma, n, t)) < 1e-12);
    if (n <= 3) REQUIRE(r.roots.size() == 1);
  }
}

TEST_CASE("root counts match a brute-force scan") {
  oracle::Draw d(99);
  for (int k = 0; k < 100; ++k) {
    const int n = d.integer(1, 6);
    const double a = d.log_uniform(0.1, 10), b = d.log_uniform(0.1, 10);
    const double gamma = d.log_uniform(1e-4, 1e4);
    const auto r = scaling_roots(a, b, gamma, n);
    CAPTURE(n);
    CAPTURE(gamma);
    CHECK(static_cast<int>(r.roots.size()) == oracle::scan_root_count(a, b, gamma, n));
  }
}

TEST_CASE("low-dimensional map is increasing") {
  oracle::Draw d(5);
  for (int k = 0; k < 1000; ++k) {
    const int n = d.integer(1, 3);
    const double a = d.log_uniform(0.1, 10), b = d.log_uniform(0.1, 10), gamma = d.log_uniform(1e-3, 1e3);
    const double t1 = d.log_uniform(1e-3, 1e3);
    const double t2 = t1 * d.uniform(1.0001, 3.0);
    REQUIRE(fibering_value(a, b, gamma, n, t2) - fibering_value(a, b, gamma, n, t1) > 0.0);
  }
}

TEST_CASE("high-dimensional ordering") {
  oracle::Draw d(17);
  int pairs = 0;
  for (int k = 0; k < 2000; ++k) {
    const int n = d.integer(5, 8);
    const double a = d.log_uniform(0.1, 10), b = d.log_uniform(0.1, 10), gamma = d.log_uniform(1e-4, 10);
    const auto r = scaling_roots(a, b, gamma, n);
    CHECK(r.regime == ScalingRegime::HighDim);
    if (r.roots.size() != 2) continue;
    ++pairs;
    REQUIRE(r.roots[0] < *r.t_star);
    REQUIRE(*r.t_star < r.roots[1]);
    REQUIRE(fibering_value(a, b, gamma, n, 0.5 * (r.roots[0] + r.roots[1])) < 0.0);
    REQUIRE(*r.f_min < 0.0);
  }
  CHECK(pairs > 100);
}

TEST_CASE("limits of the root") {
  for (int n = 1; n <= 3; ++n) {
    for (double a : {0.5, 2.0}) {
      CHECK(std::abs(scaling_roots(a, 1.3, 1e-8, n).roots[0] * std::sqrt(a) - 1.0) < 1e-4);
      const double t = scaling_roots(a, 1.3, 1e8, n).roots[0];
      CHECK(std::abs(t * std::pow(1.3e8, 1.0 / (4.0 - n)) - 1.0) < 1e-3);
    }
  }
  for (int n = 5; n <= 7; ++n) {
    const auto r = scaling_roots(2.0, 1.0, 1e-6, n);
    REQUIRE(r.roots.size() == 2);
    // lower root behaves like (b gamma)^{1/(N-4)}
    CHECK(r.roots[0] < 1.01 * std::pow(1e-6, 1.0 / (n - 4.0)));
    CHECK(std::abs(r.roots[1] - 1.0 / std::sqrt(2.0)) < 1e-2);
  }
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(scaling_roots(0, 1, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(scaling_roots(1, 0, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(scaling_roots(1, 1, -1, 3), std::invalid_argument);
  CHECK_THROWS_AS(critical_gradient(1, 1, 3), std::invalid_argument);
}

TEST_CASE("critical gradient") {
  CHECK(critical_gradient(1, 2, 4) == 0.5);
  const double g5 = critical_gradient(1, 1, 5);
  CHECK(g5 == doctest::Approx(2.0 * std::pow(3.0, -1.5)).epsilon(1e-14));
  for (int n = 5; n <= 9; ++n) {
    const double a = 1.7, b = 0.6;
    const auto r = scaling_roots(a, b, critical_gradient(a, b, n), n);
    CHECK(std::abs(*r.f_min) < 1e-12);
    // gamma*(kappa a, b) = kappa^{-(N-4)/2} gamma*(a, b)
    CHECK(critical_gradient(4 * a, b, n) ==
          doctest::Approx(std::pow(4.0, -(n - 4.0) / 2.0) * critical_gradient(a, b, n)).epsilon(1e-13));
  }
}

TEST_CASE("apply_scaling norms") {
  const auto g = pure(4);
  const auto v = solve_ground_state(g, 3, 1.0);
  const double gamma = v.norms.gradsq;

  // t = 1 is a root when a + b gamma = 1.
  const double b1 = 0.5 / gamma;
  const auto same = apply_scaling(v, 1.0, 0.5, b1);
  CHECK(same.norms.l2sq == v.norms.l2sq);
  CHECK(same.norms.gradsq == v.norms.gradsq);

  // t = 2 in 3D: 4a + 2 b gamma = 1.
  const double a2 = 0.125, b2 = 0.25 / gamma;
  const auto u = apply_scaling(v, 2.0, a2, b2);
  CHECK(u.norms.l2sq == doctest::Approx(v.norms.l2sq / 8.0).epsilon(1e-15));
  CHECK(u.norms.gradsq == doctest::Approx(v.norms.gradsq / 2.0).epsilon(1e-15));
  const auto re = radial_norms(u, g);
  CHECK(rel(re.l2sq, u.norms.l2sq) < 1e-10);
  CHECK(rel(re.gradsq, u.norms.gradsq) < 1e-10);
  CHECK(rel(re.gint, u.norms.gint) < 1e-10);

  CHECK_THROWS_AS(apply_scaling(v, 1.5, a2, b2), std::invalid_argument);
}

TEST_CASE("small gradient mass: mass tends to a^{1/2} |v|^2 in 1D") {
  const auto v = solve_ground_state(pure(4), 1, 1e-8);
  const double a = 3.0;
  const auto r = scaling_roots(a, 1.0, v.norms.gradsq, 1);
  const auto u = apply_scaling(v, r.roots[0], a, 1.0);
  CHECK(rel(u.norms.l2sq, std::sqrt(a) * v.norms.l2sq) < 1e-4);
}

TEST_CASE("invert_scaling") {
  RadialProfile z;
  z.n = 3;
  CHECK(invert_scaling(z, 4.0, 1.0).t == doctest::Approx(0.5));
  z.norms.gradsq = 3.0;
  CHECK(invert_scaling(z, 1.0, 1.0).t == doctest::Approx(0.5));

  const auto g = pure(3);
  for (int n : {1, 3, 4, 5}) {
    const auto v = solve_ground_state(g, n, n >= 4 ? 1e-4 : 1.0);
    // b chosen so that b |grad v|^2 = 0.1 and roots exist in every dimension
    const double a = 1.0, b = 0.1 / v.norms.gradsq;
    const auto roots = scaling_roots(a, b, v.norms.gradsq, n);
    REQUIRE_FALSE(roots.roots.empty());
    for (double t : roots.roots) {
      const auto u = apply_scaling(v, t, a, b);
      const auto back = invert_scaling(u, a, b);
      CHECK(rel(back.t, t) < 1e-10);
      double dev = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        dev = std::max(dev, std::abs(back.v.grid[i] - v.grid[i]) / (1.0 + v.grid[i]));
        dev = std::max(dev, std::abs(back.v.values[i] - v.values[i]));
      }
      CHECK(dev < 1e-10);
      const auto again = scaling_roots(a, b, back.v.norms.gradsq, n);
      bool contains = false;
      for (double s : again.roots) contains |= std::abs(s - back.t) < 1e-10;
      CHECK(contains);
      const auto u2 = apply_scaling(back.v, back.t, a, b);
      for (std::size_t i = 0; i < u.size(); i += 97) CHECK(std::abs(u2.grid[i] - u.grid[i]) <= 1e-10 * (1 + u.grid[i]));
    }
  }
}

TEST_CASE("Kirchhoff residual") {
  const auto g = pure(4);
  const auto v = solve_ground_state(g, 3, 2.0);
  const double a = 1.5, b = 0.02;
  const auto t = scaling_roots(a, b, v.norms.gradsq, 3).roots[0];
  auto u = apply_scaling(v, t, a, b);
  CHECK(kirchhoff_residual(u, 2.0, a, b, g) < 1e-5);
  for (auto& x : u.values) x *= 1.01;
  CHECK(kirchhoff_residual(u, 2.0, a, b, g) > 1e-3);
}
