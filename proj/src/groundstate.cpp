#include "kirchhoff/groundstate.hpp"

#include "kirchhoff/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace kirchhoff {

namespace {

using ode::State;

enum class Shot { Undershoot, Overshoot, Undecided };

struct RadialRhs {
  const Nonlinearity& g;
  int n;
  double lambda;

  State<2> operator()(double r, const State<2>& y) const {
    const double v = y[0];
    const double dv = y[1];
    // Odd extension keeps overshooting trajectories finite past v = 0.
    const double gv = v >= 0.0 ? g.g(v) : -g.g(-v);
    if (r == 0.0) return {dv, (lambda * v - gv) / n};
    return {dv, -(n - 1.0) / r * dv + lambda * v - gv};
  }
};

double default_r_max(double lambda) { return std::max(30.0 / std::sqrt(lambda), 30.0); }

double core_scale(const Nonlinearity& g, double lambda, double amplitude) {
  return std::sqrt(std::max(lambda, g.g(amplitude) / amplitude));
}

class Shooter {
 public:
  Shooter(const Nonlinearity& g, int n, double lambda, const ShootConfig& cfg)
      : g_(g), rhs_{g, n, lambda}, n_(n), lambda_(lambda), cfg_(cfg),
        r_max_(cfg.r_max > 0.0 ? cfg.r_max : default_r_max(lambda)) {}

  Shot classify(double amplitude) const {
    State<2> y{amplitude, 0.0};
    const ode::Tolerance tol{cfg_.abs_tol * amplitude, cfg_.rel_tol};
    double r = 0.0;
    double h = 1e-3 / core_scale(g_, lambda_, amplitude);
    for (long guard = 0; guard < 5000000; ++guard) {
      double step = h;
      bool last = false;
      if (r + step >= r_max_) {
        step = r_max_ - r;
        last = true;
      }
      const auto res = ode::dopri_step<2>(rhs_, r, y, step, tol);
      if (res.err > 1.0) {
        h = ode::next_step(step, res.err);
        continue;
      }
      y = res.y;
      r = last ? r_max_ : r + step;
      h = ode::next_step(step, res.err);
      if (y[0] <= 0.0) return Shot::Overshoot;
      if (y[1] >= 0.0) return Shot::Undershoot;
      if (last) return Shot::Undecided;
    }
    return Shot::Undecided;
  }

  /// Integrates outward on nodes i*h, stopping at r_max or at the first node
  /// where the shot is classified.
  void trace(double amplitude, double h, std::vector<double>& v,
             std::vector<double>& dv) const {
    v.assign(1, amplitude);
    dv.assign(1, 0.0);
    State<2> y{amplitude, 0.0};
    const ode::Tolerance tol{cfg_.abs_tol * amplitude, cfg_.rel_tol};
    double step = h;
    for (std::size_t i = 1;; ++i) {
      const double r0 = (i - 1) * h;
      const double r1 = i * h;
      if (r1 > r_max_) break;
      if (!ode::integrate_to<2>(rhs_, r0, r1, y, step, tol)) break;
      if (y[0] <= 0.0 || y[1] >= 0.0) break;
      v.push_back(y[0]);
      dv.push_back(y[1]);
    }
  }

  double r_max() const { return r_max_; }

 private:
  const Nonlinearity& g_;
  RadialRhs rhs_;
  int n_;
  double lambda_;
  const ShootConfig& cfg_;
  double r_max_;
};

/// k'/k for the decaying solution k = x^{-nu} K_nu(x), x = sqrt(lambda) r,
/// nu = N/2 - 1, of the linearized equation.
double tail_log_slope(int n, double lambda, double r) {
  const double s = std::sqrt(lambda);
  const double x = s * r;
  const double nu = n / 2.0 - 1.0;
  if (x > 500.0) return -s * (1.0 + (2.0 * nu + 1.0) / (2.0 * x));
  return -s * std::cyl_bessel_k(std::abs(nu + 1.0), x) / std::cyl_bessel_k(std::abs(nu), x);
}

double simpson(const std::vector<double>& f, double h) {
  const std::size_t m = f.size() - 1;  // intervals
  if (m == 0) return 0.0;
  if (m == 1) return 0.5 * h * (f[0] + f[1]);
  auto simpson_even = [&](std::size_t end) {
    double s = f[0] + f[end];
    for (std::size_t i = 1; i < end; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
    return s * h / 3.0;
  };
  if (m % 2 == 0) return simpson_even(m);
  // Odd interval count: Simpson 3/8 on the last three intervals.
  double s = m > 3 ? simpson_even(m - 3) : 0.0;
  const std::size_t k = m - 3;
  s += 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
  return s;
}

bool is_uniform(const std::vector<double>& grid, double& h) {
  const std::size_t m = grid.size() - 1;
  h = (grid.back() - grid.front()) / m;
  for (std::size_t i = 0; i <= m; ++i)
    if (std::abs(grid[i] - (grid.front() + i * h)) > 1e-9 * h * (i + 1)) return false;
  return true;
}

/// Composite trapezoid on a nonuniform grid, used only as a fallback.
double trapezoid(const std::vector<double>& x, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
  return s;
}

void finish_profile(RadialProfile& p, const Nonlinearity& g) {
  p.norms = radial_norms(p, g);
  p.diagnostics.ode_residual_sup = radial_residual(p, 1.0, p.lambda, g);
  p.diagnostics.pohozaev_rel_residual = pohozaev_residual(p);
}

}  // namespace

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

double turning_amplitude(const Nonlinearity& g, double lambda) {
  auto h = [&](double s) { return g.G(s) / (s * s) - 0.5 * lambda; };
  double lo = 1.0, hi = 1.0;
  if (h(1.0) < 0.0) {
    while (h(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) throw ShootingError(ShootingError::Kind::BracketNotFound, "no turning amplitude");
    }
  } else {
    while (h(lo) >= 0.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) throw ShootingError(ShootingError::Kind::BracketNotFound, "no turning amplitude");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 2e-16 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RadialProfile solve_ground_state(const ProblemParams& pp, double lambda, const ShootConfig& cfg) {
  return solve_ground_state(pp.nonlinearity(), pp.n(), lambda, cfg);
}

RadialProfile solve_ground_state(const Nonlinearity& g, int n, double lambda,
                                 const ShootConfig& cfg) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (cfg.max_bisections < 40) throw std::invalid_argument("max_bisections must be at least 40");
  if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0))
    throw std::invalid_argument("tolerances must be positive");

  Shooter shooter(g, n, lambda, cfg);
  RadialProfile out;
  out.lambda = lambda;
  out.n = n;

  // --- bracket the amplitude -------------------------------------------------
  std::optional<std::pair<double, double>> bracket;
  if (cfg.amplitude_hint && *cfg.amplitude_hint > 0.0) {
    double lo = *cfg.amplitude_hint / 1.02;
    double hi = *cfg.amplitude_hint * 1.02;
    int tries = 0;
    while (shooter.classify(lo) != Shot::Undershoot && ++tries < 40) lo /= 1.2;
    while (shooter.classify(hi) == Shot::Undershoot && ++tries < 80) hi *= 1.2;
    if (tries < 80 && shooter.classify(lo) == Shot::Undershoot) bracket = {lo, hi};
  }
  if (!bracket) {
    const double turn = turning_amplitude(g, lambda);
    const double ratio = std::sqrt(2.0);
    std::vector<double> amps;
    for (double a = turn * cfg.amp_lo_factor; a <= turn * cfg.amp_hi_factor * 1.0000001; a *= ratio)
      amps.push_back(a);
    std::vector<Shot> shots(amps.size());
    for (std::size_t k = 0; k < amps.size(); ++k) shots[k] = shooter.classify(amps[k]);
    for (std::size_t k = 0; k + 1 < amps.size(); ++k)
      if (shots[k] == Shot::Undershoot && shots[k + 1] != Shot::Undershoot)
        out.amplitude_brackets.emplace_back(amps[k], amps[k + 1]);
    if (out.amplitude_brackets.empty()) {
      std::ostringstream os;
      os << "no (undershoot, overshoot) amplitude pair in [" << amps.front() << ", "
         << amps.back() << "] at lambda=" << lambda;
      throw ShootingError(ShootingError::Kind::BracketNotFound, os.str());
    }
    bracket = out.amplitude_brackets.front();
    if (out.amplitude_brackets.size() > 1) {
      std::ostringstream os;
      os.precision(10);
      os << "multiple-bracket: " << out.amplitude_brackets.size()
         << " amplitude brackets at lambda=" << lambda << ", selected the lowest [";
      for (const auto& [a, b] : out.amplitude_brackets) os << " (" << a << "," << b << ")";
      os << " ]";
      out.warnings.push_back(os.str());
    }
  }

  // --- bisection -------------------------------------------------------------
  auto [lo, hi] = *bracket;
  for (int it = 0; it < cfg.max_bisections && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi;
       ++it) {
    const double mid = 0.5 * (lo + hi);
    const Shot s = shooter.classify(mid);
    if (s == Shot::Undershoot) {
      lo = mid;
    } else if (s == Shot::Overshoot) {
      hi = mid;
    } else {
      lo = hi = mid;
    }
  }
  const double amplitude = 0.5 * (lo + hi);

  // --- outward profile up to where the bracketing shots separate -------------
  const double h = cfg.grid_resolution / core_scale(g, lambda, amplitude);
  std::vector<double> v_lo, dv_lo, v_hi, dv_hi;
  shooter.trace(lo, h, v_lo, dv_lo);
  shooter.trace(hi, h, v_hi, dv_hi);
  const std::size_t common = std::min(v_lo.size(), v_hi.size());
  std::size_t cut = 0;
  for (std::size_t i = 1; i < common; ++i) {
    const double vm = 0.5 * (v_lo[i] + v_hi[i]);
    if (std::abs(v_lo[i] - v_hi[i]) > 1e-6 * vm) break;
    cut = i;
    if (vm < 1e-12 * amplitude) break;
  }
  const double v_cut = 0.5 * (v_lo[cut] + v_hi[cut]);
  if (cut < 8 || v_cut > 1e-2 * amplitude) {
    std::ostringstream os;
    os << "shooting lost the solution before the tail at lambda=" << lambda
       << " (v(cut)/v(0)=" << v_cut / amplitude << ")";
    throw ShootingError(ShootingError::Kind::NotConverged, os.str());
  }

  // --- tail: integrate the decaying solution inward and match at the cut ------
  const double sl = std::sqrt(lambda);
  const double r_cut = cut * h;
  const double x_end = std::max(30.0, 10.0 * (n - 1) + 5.0);
  const double r_end = std::max(r_cut + 10.0 / sl, x_end / sl);
  std::size_t m_total = cut + static_cast<std::size_t>(std::ceil((r_end - r_cut) / h));
  if (m_total % 2) ++m_total;
  const double r_far = m_total * h;

  RadialRhs rhs{g, n, lambda};
  std::vector<double> tail_v(m_total - cut + 1), tail_dv(m_total - cut + 1);
  const double kappa = tail_log_slope(n, lambda, r_far);
  double eps = v_cut * std::exp(-sl * (r_far - r_cut)) * std::pow(r_cut / r_far, 0.5 * (n - 1));
  for (int it = 0; it < 40; ++it) {
    State<2> y{eps, eps * kappa};
    const ode::Tolerance tol{1e-3 * eps, cfg.rel_tol};
    double step = -h;
    tail_v.back() = y[0];
    tail_dv.back() = y[1];
    bool ok = true;
    for (std::size_t i = m_total; i > cut; --i) {
      if (!ode::integrate_to<2>(rhs, i * h, (i - 1) * h, y, step, tol)) {
        ok = false;
        break;
      }
      tail_v[i - 1 - cut] = y[0];
      tail_dv[i - 1 - cut] = y[1];
    }
    if (!ok || !(tail_v.front() > 0.0))
      throw ShootingError(ShootingError::Kind::NotConverged, "tail integration failed");
    const double ratio = v_cut / tail_v.front();
    eps *= ratio;
    if (std::abs(ratio - 1.0) < 1e-13) break;
  }

  out.grid.resize(m_total + 1);
  out.values.resize(m_total + 1);
  out.derivs.resize(m_total + 1);
  for (std::size_t i = 0; i <= m_total; ++i) out.grid[i] = i * h;
  for (std::size_t i = 0; i < cut; ++i) {
    out.values[i] = 0.5 * (v_lo[i] + v_hi[i]);
    out.derivs[i] = 0.5 * (dv_lo[i] + dv_hi[i]);
  }
  for (std::size_t i = cut; i <= m_total; ++i) {
    out.values[i] = tail_v[i - cut];
    out.derivs[i] = tail_dv[i - cut];
  }
  out.values[0] = amplitude;
  out.derivs[0] = 0.0;
  out.tail_rate = sl;

  for (std::size_t i = 1; i <= m_total; ++i) {
    if (!(out.values[i] > 0.0) || out.derivs[i] > 0.0) {
      out.warnings.push_back("profile is not positive and decreasing on the whole grid");
      break;
    }
  }
  finish_profile(out, g);
  return out;
}

ProfileNorms radial_norms(const RadialProfile& p, const Nonlinearity& g) {
  ProfileNorms out;
  const std::size_t m = p.grid.size();
  if (m < 2) return out;
  std::vector<double> f2(m), fd(m), fg(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double w = p.n == 1 ? 1.0 : std::pow(p.grid[i], p.n - 1);
    f2[i] = p.values[i] * p.values[i] * w;
    fd[i] = p.derivs[i] * p.derivs[i] * w;
    fg[i] = g.G(p.values[i]) * w;
  }
  double h = 0.0;
  if (is_uniform(p.grid, h)) {
    out.l2sq = simpson(f2, h);
    out.gradsq = simpson(fd, h);
    out.gint = simpson(fg, h);
  } else {
    out.l2sq = trapezoid(p.grid, f2);
    out.gradsq = trapezoid(p.grid, fd);
    out.gint = trapezoid(p.grid, fg);
  }
  if (p.tail_rate > 0.0) {
    const double k2 = 2.0 * p.tail_rate;
    out.l2sq += f2.back() / k2;
    out.gradsq += fd.back() / k2;
    out.gint += fg.back() / k2;
  }
  const double area = sphere_area(p.n);
  out.l2sq *= area;
  out.gradsq *= area;
  out.gint *= area;
  return out;
}

double radial_residual(const RadialProfile& u, double coeff, double lambda, const Nonlinearity& g) {
  const std::size_t m = u.grid.size();
  if (m < 100) throw std::invalid_argument("grid too coarse for a finite-difference residual");
  const double u0 = u.values.front();
  const double scale = std::max(lambda * u0, g.g(u0));
  if (scale == 0.0) return 0.0;

  double h = 0.0;
  const bool uniform = is_uniform(u.grid, h);
  auto val = [&](std::ptrdiff_t i) { return u.values[static_cast<std::size_t>(i < 0 ? -i : i)]; };
  double sup = 0.0;
  for (std::size_t i = 1; i + 2 < m; ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    double d1, d2;
    if (uniform) {
      d1 = (-val(k + 2) + 8.0 * val(k + 1) - 8.0 * val(k - 1) + val(k - 2)) / (12.0 * h);
      d2 = (-val(k + 2) + 16.0 * val(k + 1) - 30.0 * val(k) + 16.0 * val(k - 1) - val(k - 2)) /
           (12.0 * h * h);
    } else {
      const double hm = u.grid[i] - u.grid[i - 1];
      const double hp = u.grid[i + 1] - u.grid[i];
      const double fm = u.values[i - 1], f0 = u.values[i], fp = u.values[i + 1];
      d1 = (fp * hm * hm - fm * hp * hp + f0 * (hp * hp - hm * hm)) / (hm * hp * (hm + hp));
      d2 = 2.0 * (fp * hm + fm * hp - f0 * (hm + hp)) / (hm * hp * (hm + hp));
    }
    const double r = u.grid[i];
    const double lap = d2 + (u.n - 1.0) / r * d1;
    const double res = std::abs(-coeff * lap + lambda * u.values[i] - g.g(u.values[i]));
    sup = std::max(sup, res);
  }
  return sup / scale;
}

std::pair<double, double> closed_form_soliton_at(double q, double lambda, double mu, double x) {
  const double c = std::pow(lambda / mu * (q + 1.0) / 2.0, 1.0 / (q - 1.0));
  const double p = 2.0 / (q - 1.0);
  const double k = (q - 1.0) * std::sqrt(lambda) / 2.0;
  const double e = std::exp(-2.0 * k * x);
  const double sech = 2.0 * std::exp(-k * x) / (1.0 + e);
  const double tanh = (1.0 - e) / (1.0 + e);
  const double sp = std::pow(sech, p);
  return {c * sp, -c * p * k * sp * tanh};
}

RadialProfile closed_form_soliton(double q, double lambda, double mu, double spacing) {
  if (!(q > 1.0) || !(lambda > 0.0) || !(mu > 0.0))
    throw std::invalid_argument("closed-form soliton needs q > 1, lambda > 0, mu > 0");
  const double c = std::pow(lambda / mu * (q + 1.0) / 2.0, 1.0 / (q - 1.0));
  const double p = 2.0 / (q - 1.0);
  const double k = (q - 1.0) * std::sqrt(lambda) / 2.0;
  const double h = spacing > 0.0 ? spacing : 0.01 / std::sqrt(std::max(lambda, mu * std::pow(c, q - 1.0)));
  std::size_t m = static_cast<std::size_t>(std::ceil(30.0 / std::sqrt(lambda) / h));
  if (m % 2) ++m;

  RadialProfile out;
  out.lambda = lambda;
  out.n = 1;
  out.tail_rate = std::sqrt(lambda);
  out.grid.resize(m + 1);
  out.values.resize(m + 1);
  out.derivs.resize(m + 1);
  double res = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    const double x = i * h;
    const auto [v, dv] = closed_form_soliton_at(q, lambda, mu, x);
    out.grid[i] = x;
    out.values[i] = v;
    out.derivs[i] = dv;
    const double e = std::exp(-2.0 * k * x);
    const double sech = 2.0 * std::exp(-k * x) / (1.0 + e);
    const double tanh = (1.0 - e) / (1.0 + e);
    const double d2 = c * p * k * k * std::pow(sech, p) * (p * tanh * tanh - sech * sech);
    res = std::max(res, std::abs(d2 - lambda * v + mu * std::pow(v, q)));
  }
  const Nonlinearity g(NonlinearityParams::pure(Exponent(q + 1.0), mu));
  out.norms = radial_norms(out, g);
  out.diagnostics.ode_residual_sup = res / std::max(lambda * c, mu * std::pow(c, q));
  out.diagnostics.pohozaev_rel_residual = pohozaev_residual(out);
  return out;
}

PurePowerNorms pure_power_rescale(const PurePowerNorms& unit, double lambda, double mu, double p,
                                  int n) {
  const double amp2 = std::pow(lambda / mu, 2.0 / (p - 2.0));
  return {amp2 * std::pow(lambda, -n / 2.0) * unit.l2sq,
          amp2 * std::pow(lambda, 1.0 - n / 2.0) * unit.gradsq};
}

PurePowerNorms unit_pure_power_norms(double p, int n, const ShootConfig& cfg) {
  const Nonlinearity g(NonlinearityParams::pure(Exponent(p)));
  const auto prof = solve_ground_state(g, n, 1.0, cfg);
  return {prof.norms.l2sq, prof.norms.gradsq};
}

double pohozaev_residual(const RadialProfile& p) {
  const double n = p.n;
  const auto& nm = p.norms;
  const double lhs = 0.5 * (n - 2.0) * nm.gradsq + 0.5 * n * p.lambda * nm.l2sq - n * nm.gint;
  return std::abs(lhs) / (1.0 + n * nm.gint);
}

EnergyValues energy_values(const ProfileNorms& norms, double lambda, double a, double b) {
  const double i_val = 0.5 * a * norms.gradsq + 0.25 * b * norms.gradsq * norms.gradsq - norms.gint;
  return {i_val + 0.5 * lambda * norms.l2sq, i_val};
}

}  // namespace kirchhoff
