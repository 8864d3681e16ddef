#include "kirchhoff/scaling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kirchhoff {

namespace {

constexpr double kRootTol = 1e-12;
constexpr double kApplyTol = 1e-8;

/// Bisection on a bracket with f(lo) < 0 < f(hi) (or the reverse, given by
/// `increasing`), stopping when |f| < kRootTol or the bracket is exhausted.
template <class F>
double bisect(F f, double lo, double hi, bool increasing) {
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) < 0.01 * kRootTol) return mid;
    if ((fm < 0.0) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  // Return the bracket end with the smaller residual.
  const double cands[] = {lo, mid, hi};
  double best = mid;
  for (double c : cands)
    if (std::abs(f(c)) < std::abs(f(best))) best = c;
  return best;
}

}  // namespace

std::string_view to_string(ScalingRegime r) {
  switch (r) {
    case ScalingRegime::LowDim: return "LowDim";
    case ScalingRegime::FourDim: return "FourDim";
    case ScalingRegime::HighDim: return "HighDim";
  }
  return "?";
}

double fibering_value(double a, double b, double gamma, int n, double t) {
  return a * t * t + b * gamma * std::pow(t, 4.0 - n) - 1.0;
}

ScalingRoots scaling_roots(double a, double b, double gamma, int n) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("a and b must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and >= 0");
  if (n < 1) throw std::invalid_argument("n must be >= 1");

  ScalingRoots out;
  out.gamma = gamma;
  auto f = [&](double t) { return fibering_value(a, b, gamma, n, t); };

  if (n <= 3) {
    out.regime = ScalingRegime::LowDim;
    double hi = 1.0;
    while (f(hi) <= 0.0) hi *= 2.0;
    double lo = hi;
    while (f(lo) >= 0.0) lo *= 0.5;
    out.roots.push_back(bisect(f, lo, hi, true));
    return out;
  }

  if (n == 4) {
    out.regime = ScalingRegime::FourDim;
    if (b * gamma < 1.0) out.roots.push_back(std::sqrt((1.0 - b * gamma) / a));
    return out;
  }

  out.regime = ScalingRegime::HighDim;
  const double upper = 1.0 / std::sqrt(a);
  if (gamma == 0.0) {
    out.roots.push_back(upper);
    return out;
  }
  const double nn = n;
  const double t_star = std::pow((nn - 4.0) * b * gamma / (2.0 * a), 1.0 / (nn - 2.0));
  const double f_min = std::pow(2.0, -2.0 / (nn - 2.0)) * (nn - 2.0) *
                           std::pow(nn - 4.0, -(nn - 4.0) / (nn - 2.0)) *
                           std::pow(a, (nn - 4.0) / (nn - 2.0)) *
                           std::pow(b * gamma, 2.0 / (nn - 2.0)) -
                       1.0;
  out.t_star = t_star;
  out.f_min = f_min;
  if (std::abs(f_min) <= kRootTol) {
    out.degenerate = true;
    out.roots.push_back(t_star);
    return out;
  }
  if (f_min > 0.0) return out;

  double lo = t_star;
  while (f(lo) <= 0.0) lo *= 0.5;
  out.roots.push_back(bisect(f, lo, t_star, false));
  out.roots.push_back(bisect(f, t_star, upper, true));
  return out;
}

RadialProfile apply_scaling(const RadialProfile& v, double t, double a, double b) {
  if (!(t > 0.0)) throw std::invalid_argument("scaling factor must be positive");
  const double res = fibering_value(a, b, v.norms.gradsq, v.n, t);
  if (std::abs(res) > kApplyTol)
    throw std::invalid_argument("t is not a root of the fibering map for this profile");
  RadialProfile u = v;
  for (auto& r : u.grid) r /= t;
  for (auto& d : u.derivs) d *= t;
  u.tail_rate = v.tail_rate * t;
  const double n = v.n;
  u.norms.l2sq = std::pow(t, -n) * v.norms.l2sq;
  u.norms.gradsq = std::pow(t, 2.0 - n) * v.norms.gradsq;
  u.norms.gint = std::pow(t, -n) * v.norms.gint;
  return u;
}

InvertedScaling invert_scaling(const RadialProfile& u, double a, double b) {
  InvertedScaling out;
  out.t = 1.0 / std::sqrt(a + b * u.norms.gradsq);
  const double t = out.t;
  out.v = u;
  for (auto& r : out.v.grid) r *= t;
  for (auto& d : out.v.derivs) d /= t;
  out.v.tail_rate = u.tail_rate / t;
  const double n = u.n;
  out.v.norms.l2sq = std::pow(t, n) * u.norms.l2sq;
  out.v.norms.gradsq = std::pow(t, n - 2.0) * u.norms.gradsq;
  out.v.norms.gint = std::pow(t, n) * u.norms.gint;
  return out;
}

double kirchhoff_residual(const RadialProfile& u, double lambda, double a, double b,
                          const Nonlinearity& g) {
  return radial_residual(u, a + b * u.norms.gradsq, lambda, g);
}

double critical_gradient(double a, double b, int n) {
  if (n <= 3) throw std::invalid_argument("critical gradient exists only for n >= 4");
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("a and b must be positive");
  if (n == 4) return 1.0 / b;
  const double nn = n;
  const double inner = std::pow(2.0, 2.0 / (nn - 2.0)) / (nn - 2.0) *
                       std::pow(nn - 4.0, (nn - 4.0) / (nn - 2.0)) *
                       std::pow(a, -(nn - 4.0) / (nn - 2.0)) * std::pow(b, -2.0 / (nn - 2.0));
  return std::pow(inner, (nn - 2.0) / 2.0);
}

}  // namespace kirchhoff
