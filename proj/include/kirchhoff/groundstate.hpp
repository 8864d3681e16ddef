// Positive radial ground states of -Lap v + lambda v = g(v) in R^N by
// amplitude shooting, plus closed-form and identity-based oracles.

#pragma once

#include "kirchhoff/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kirchhoff {

struct ProfileNorms {
  double l2sq = 0.0;    // |v|_2^2
  double gradsq = 0.0;  // |grad v|_2^2
  double gint = 0.0;    // int G(v)
};

struct ProfileDiagnostics {
  double ode_residual_sup = 0.0;
  double pohozaev_rel_residual = 0.0;
};

/// A radial function sampled on r_0 = 0 < r_1 < ... < r_M. Profiles built by
/// this library use a uniform grid; beyond r_M the function is taken to decay
/// like exp(-tail_rate r).
struct RadialProfile {
  double lambda = 0.0;
  int n = 1;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> derivs;
  double tail_rate = 0.0;
  ProfileNorms norms;
  ProfileDiagnostics diagnostics;
  /// Every (undershoot, overshoot) amplitude pair found by the scan.
  std::vector<std::pair<double, double>> amplitude_brackets;
  std::vector<std::string> warnings;

  double amplitude() const { return values.empty() ? 0.0 : values.front(); }
  std::size_t size() const { return grid.size(); }
};

struct ShootConfig {
  double r_max = 0.0;  // 0 selects max(30/sqrt(lambda), 30)
  /// Step control. `abs_tol` is measured in units of the shooting amplitude.
  double abs_tol = 1e-15;
  double rel_tol = 1e-12;
  /// Amplitude scan range as multiples of the turning amplitude, where
  /// G(s) = lambda s^2 / 2.
  double amp_lo_factor = 0.999;
  double amp_hi_factor = 1e4;
  int max_bisections = 200;
  /// Output grid spacing is grid_resolution / sqrt(max(lambda, g(A)/A)).
  double grid_resolution = 0.01;
  /// Warm start: search for a bracket around this amplitude first.
  std::optional<double> amplitude_hint;
};

class ShootingError : public std::runtime_error {
 public:
  enum class Kind { BracketNotFound, NotConverged };
  ShootingError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Shooting solve for the lowest-amplitude positive radial ground state.
/// Throws ShootingError::BracketNotFound if no (undershoot, overshoot) pair
/// exists in the configured amplitude range.
RadialProfile solve_ground_state(const ProblemParams& pp, double lambda,
                                 const ShootConfig& cfg = {});
RadialProfile solve_ground_state(const Nonlinearity& g, int n, double lambda,
                                 const ShootConfig& cfg = {});

/// The turning amplitude: the positive zero of G(s) - lambda s^2 / 2.
double turning_amplitude(const Nonlinearity& g, double lambda);

/// Composite Simpson with surface measure omega_{N-1} r^{N-1} plus the
/// analytic exp(-2 tail_rate r) tail beyond r_M. omega_0 = 2.
ProfileNorms radial_norms(const RadialProfile& profile, const Nonlinearity& g);

/// Surface area of the unit sphere in R^N (2 for N = 1).
double sphere_area(int n);

/// N = 1 only: (lambda/mu)^{1/(q-1)} ((q+1)/2)^{1/(q-1)} sech^{2/(q-1)}((q-1) sqrt(lambda) x / 2)
/// solving -v'' + lambda v = mu v^q, sampled on a uniform grid of the given
/// spacing (0 picks the solver's default spacing).
RadialProfile closed_form_soliton(double q, double lambda, double mu, double spacing = 0.0);

/// Value and derivative of the closed-form soliton at x >= 0.
std::pair<double, double> closed_form_soliton_at(double q, double lambda, double mu, double x);

/// Norms of the ground state of -Lap v + lambda v = mu v^{p-1} from those of
/// U_{p-1} by the pure-power rescaling v(x) = (lambda/mu)^{1/(p-2)} U(sqrt(lambda) x).
PurePowerNorms pure_power_rescale(const PurePowerNorms& unit, double lambda, double mu,
                                  double p, int n);

/// Norms of U_{p-1} (lambda = mu = 1) by shooting.
PurePowerNorms unit_pure_power_norms(double p, int n, const ShootConfig& cfg = {});

/// |(N-2)/2 |grad v|^2 + N/2 lambda |v|^2 - N int G(v)| / (1 + N int G(v)).
double pohozaev_residual(const RadialProfile& profile);

struct EnergyValues {
  double phi_lambda = 0.0;
  double i_functional = 0.0;
};

/// Phi_lambda and I = Phi_0 from cached norms.
EnergyValues energy_values(const ProfileNorms& norms, double lambda, double a, double b);

/// sup over interior nodes of |-coeff (u'' + (N-1)/r u') + lambda u - g(u)|
/// divided by max(lambda u(0), g(u(0))), with fourth-order central
/// differences on the stored values (even reflection at r = 0). The zero
/// profile has residual 0. Throws std::invalid_argument below 100 nodes.
double radial_residual(const RadialProfile& u, double coeff, double lambda,
                       const Nonlinearity& g);

}  // namespace kirchhoff
