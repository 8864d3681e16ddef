// Embedded Dormand-Prince 5(4) stepper for small fixed-size systems.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace kirchhoff::ode {

template <std::size_t Dim>
using State = std::array<double, Dim>;

struct Tolerance {
  double abs = 1e-14;
  double rel = 1e-12;
};

template <std::size_t Dim>
struct StepResult {
  State<Dim> y{};
  double err = 0.0;  // scaled error norm, accept when <= 1
};

/// One Dormand-Prince step of size h from (x, y). `rhs(x, y)` returns dy/dx.
template <std::size_t Dim, class Rhs>
StepResult<Dim> dopri_step(const Rhs& rhs, double x, const State<Dim>& y, double h,
                           const Tolerance& tol) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto axpy = [&](std::initializer_list<std::pair<double, const State<Dim>*>> terms) {
    State<Dim> out = y;
    for (std::size_t i = 0; i < Dim; ++i) {
      double acc = 0.0;
      for (const auto& [c, k] : terms) acc += c * (*k)[i];
      out[i] += h * acc;
    }
    return out;
  };

  const State<Dim> k1 = rhs(x, y);
  const State<Dim> k2 = rhs(x + c2 * h, axpy({{a21, &k1}}));
  const State<Dim> k3 = rhs(x + c3 * h, axpy({{a31, &k1}, {a32, &k2}}));
  const State<Dim> k4 = rhs(x + c4 * h, axpy({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const State<Dim> k5 =
      rhs(x + c5 * h, axpy({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const State<Dim> k6 =
      rhs(x + h, axpy({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const State<Dim> y5 =
      axpy({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const State<Dim> k7 = rhs(x + h, y5);

  double err2 = 0.0;
  for (std::size_t i = 0; i < Dim; ++i) {
    const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
    const double sc = tol.abs + tol.rel * std::max(std::abs(y[i]), std::abs(y5[i]));
    err2 += (e / sc) * (e / sc);
  }
  return {y5, std::sqrt(err2 / Dim)};
}

inline double next_step(double h, double err) {
  const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
  return h * fac;
}

/// Adaptive integration from x0 to x1 (either direction). `h` is the
/// suggested first step on entry and the last accepted step size on exit.
/// Returns false if the step size underflows.
template <std::size_t Dim, class Rhs>
bool integrate_to(const Rhs& rhs, double x0, double x1, State<Dim>& y, double& h,
                  const Tolerance& tol) {
  const double dir = x1 >= x0 ? 1.0 : -1.0;
  double x = x0;
  h = dir * std::abs(h);
  int guard = 0;
  while (dir * (x1 - x) > 0.0) {
    bool last = false;
    double step = h;
    if (dir * (x + step - x1) >= 0.0) {
      step = x1 - x;
      last = true;
    }
    const auto res = dopri_step<Dim>(rhs, x, y, step, tol);
    if (res.err <= 1.0) {
      y = res.y;
      x = last ? x1 : x + step;
      if (!last) h = next_step(step, res.err);
    } else {
      h = next_step(step, res.err);
    }
    if (std::abs(h) < 1e-300 || ++guard > 10000000) return false;
  }
  return true;
}

}  // namespace kirchhoff::ode
