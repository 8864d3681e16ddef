// Mass curves lambda -> |u_lambda|_2^2 of the Kirchhoff solution branch,
// the critical frequency lambda* for N >= 4, endpoint checks and the
// normalized problem |u|_2^2 = c.

#pragma once

#include "kirchhoff/groundstate.hpp"
#include "kirchhoff/model.hpp"
#include "kirchhoff/scaling.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kirchhoff {

enum class Family { Only, Lower, Upper };

std::string_view to_string(Family f);

enum class ExecutionPolicy { Serial, Parallel };

class BranchError : public std::runtime_error {
 public:
  enum class Kind { InvalidArgument, NoCrossing, InsufficientRange, SolverFailure };
  BranchError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct BranchSample {
  double lambda = 0.0;
  Family family = Family::Only;
  double t = 0.0;
  double mass = 0.0;      // |u|_2^2
  double gradsq = 0.0;    // |grad u|_2^2
  double energy = 0.0;    // I[u]
  double residual = 0.0;  // Kirchhoff residual
  // Semilinear data the sample was built from.
  double amplitude = 0.0;
  double v_l2sq = 0.0;
  double v_gradsq = 0.0;
  double pohozaev = 0.0;
};

struct BranchConfig {
  ShootConfig shoot;
  ExecutionPolicy policy = ExecutionPolicy::Parallel;
  /// Geometric points added between the last grid point and lambda* (N >= 4).
  int refine_points = 16;
  /// Relative bracket width for lambda*.
  double star_rel_width = 1e-6;
  /// Compute U_{alpha-1}, U_{beta-1} norms for the endpoint prediction.
  bool predict_endpoints = true;
};

/// Everything computed at one lambda.
struct BranchPoint {
  double lambda = 0.0;
  std::optional<RadialProfile> profile;  // semilinear ground state
  ScalingRoots roots;
  std::vector<BranchSample> samples;
  std::string error;  // non-empty when the ground-state solve failed
  std::vector<std::string> warnings;

  bool ok() const { return error.empty(); }
};

/// Family tags for a root set: Only for N <= 4, Lower/Upper for N >= 5. A
/// degenerate double root is reported in both families.
std::vector<std::pair<Family, double>> tag_roots(const ScalingRoots& roots, int n);

/// Builds the samples of one semilinear profile.
std::vector<BranchSample> samples_from_profile(const ProblemParams& pp, const RadialProfile& v,
                                               const ScalingRoots& roots);

/// Independent per-lambda work. The result is ordered like `lambdas` and does
/// not depend on the policy.
std::vector<BranchPoint> evaluate_branch_points(const ProblemParams& pp,
                                                const std::vector<double>& lambdas,
                                                const ShootConfig& cfg, ExecutionPolicy policy);

struct LambdaStar {
  double lambda = 0.0;  // bracket midpoint
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double gamma = 0.0;  // |grad v|^2 at lambda
  double gamma_star = 0.0;
  RadialProfile profile;
  int iterations = 0;
};

/// Bisection on gamma(lambda) - gamma* between lambda_lo and lambda_hi to
/// the configured relative width. Throws BranchError::NoCrossing when the
/// endpoints do not straddle gamma*.
LambdaStar detect_lambda_star(const ProblemParams& pp, double lambda_lo, double lambda_hi,
                              const BranchConfig& cfg = {});

struct MassCurve {
  int n = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int points = 0;
  /// Sorted by family, then lambda.
  std::vector<BranchSample> samples;
  std::optional<LambdaStar> star;
  std::optional<AsymptoticPrediction> endpoint_prediction;
  EndpointNormData endpoint_norms;
  std::vector<std::string> warnings;
  /// Set when a ground-state failure cut the sweep short.
  std::optional<std::string> failure;

  std::vector<BranchSample> family(Family f) const;
  std::vector<Family> families() const;
  std::optional<double> lambda_star() const {
    return star ? std::optional<double>(star->lambda) : std::nullopt;
  }
};

std::vector<double> log_grid(double lo, double hi, int points);

/// Sweeps lambda on a log grid. For N >= 4 the sweep stops at the first
/// empty root set, locates lambda* and refines geometrically towards it. If
/// the root set is already empty at lambda_min the window is moved below
/// lambda* keeping its log-width (with a warning).
MassCurve trace_branch(const ProblemParams& pp, double lambda_min, double lambda_max, int points,
                       const BranchConfig& cfg = {});

struct NormalizedSolution {
  double lambda = 0.0;
  Family family = Family::Only;
  double t = 0.0;
  RadialProfile profile;  // Kirchhoff profile u
  double mass_achieved = 0.0;
  double mass_error = 0.0;
  double residual = 0.0;
  double energy = 0.0;
  int iterations = 0;
};

struct CrossingFailure {
  Family family = Family::Only;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  std::string message;
};

struct MassSolveResult {
  std::vector<NormalizedSolution> solutions;  // sorted by lambda
  std::vector<CrossingFailure> failures;
};

/// Refines every sign change of mass - c along each family. Refinement
/// failures are reported per crossing.
MassSolveResult solve_for_mass(const ProblemParams& pp, double c, const MassCurve& curve,
                               const BranchConfig& cfg = {}, double rel_tol = 1e-6);

enum class CheckKind { Finite, Divergence, Vanishing, Agreement };

std::string_view to_string(CheckKind k);

struct EndpointCheck {
  std::string name;
  Family family = Family::Only;
  CheckKind kind = CheckKind::Finite;
  double lambda = 0.0;     // sample used
  double observed = 0.0;
  double predicted = 0.0;  // +inf for divergence, 0 for vanishing
  double deviation = 0.0;  // relative deviation, or the trend ratio to the median
  double tolerance = 0.0;
  bool passed = false;
};

struct AsymptoticsReport {
  std::vector<EndpointCheck> checks;
  bool all_passed() const;
};

/// Endpoint comparisons: 2% at lambda -> 0, 5% at lambda -> infinity, 2% at
/// lambda* and 1% agreement between the two families there. Infinite and zero
/// limits are checked as trends of the three extreme samples against 10x /
/// 0.1x the family median. Throws BranchError::InsufficientRange when the
/// curve does not reach lambda <= 1e-3 and lambda >= 1e3 (N <= 3) or lambda*.
AsymptoticsReport verify_asymptotics(const MassCurve& curve, const AsymptoticPrediction& pred);

/// Least-squares slope of log(mass) against log(lambda) over samples of one
/// family with lambda in [lo, hi].
double loglog_slope(const std::vector<BranchSample>& samples, double lo, double hi);

}  // namespace kirchhoff
