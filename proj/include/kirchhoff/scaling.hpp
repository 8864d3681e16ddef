// The fibering map f(t) = a t^2 + b gamma t^{4-N} - 1 and the rescaling
// u(x) = v(t x) that turns a semilinear ground state into a Kirchhoff one.

#pragma once

#include "kirchhoff/groundstate.hpp"

#include <optional>
#include <vector>

namespace kirchhoff {

enum class ScalingRegime { LowDim, FourDim, HighDim };

std::string_view to_string(ScalingRegime r);

struct ScalingRoots {
  ScalingRegime regime = ScalingRegime::LowDim;
  std::vector<double> roots;     // increasing
  std::optional<double> t_star;  // N >= 5
  std::optional<double> f_min;   // N >= 5
  double gamma = 0.0;
  bool degenerate = false;       // |f_min| <= 1e-12, single root t_star
};

double fibering_value(double a, double b, double gamma, int n, double t);

/// Positive roots of the fibering map. Throws std::invalid_argument for
/// a, b <= 0, gamma < 0 or n < 1.
ScalingRoots scaling_roots(double a, double b, double gamma, int n);

/// The Kirchhoff profile u(r) = v(t r). Norms are set algebraically from
/// those of v. Throws std::invalid_argument when |f(t)| > 1e-8 for
/// gamma = |grad v|^2.
RadialProfile apply_scaling(const RadialProfile& v, double t, double a, double b);

struct InvertedScaling {
  double t = 0.0;
  RadialProfile v;
};

/// t = (a + b |grad u|^2)^{-1/2} and v(y) = u(y / t).
InvertedScaling invert_scaling(const RadialProfile& u, double a, double b);

/// Sup-norm residual of -(a + b |grad u|^2) Lap u + lambda u - g(u), using
/// the cached gradient norm of u. See radial_residual for the normalization.
double kirchhoff_residual(const RadialProfile& u, double lambda, double a, double b,
                          const Nonlinearity& g);

/// The gradient mass at which the fibering map loses its roots (n >= 4).
double critical_gradient(double a, double b, int n);

}  // namespace kirchhoff
