// Nonlinearity families, problem parameters and the regime classification
// for the Kirchhoff normalized-solution problem
//
//   -(a + b |grad u|_2^2) Lap u + lambda u = g(u)  in R^N,   |u|_2^2 = c.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kirchhoff {

/// An exponent that remembers its exact rational value when it has one.
///
/// Exponents parsed from "10/3", "4" or "3.25" are exact, so that ties with
/// the critical exponents 2+4/N and 2+8/N are decided by integer arithmetic.
/// Exponents built from a double are inexact and are compared with a 1e-12
/// tolerance; they are never reported as ties.
class Exponent {
 public:
  explicit Exponent(double value) : value_(value) {}

  static Exponent rational(std::int64_t num, std::int64_t den);
  /// Throws std::invalid_argument on malformed text.
  static Exponent parse(std::string_view text);

  double value() const { return value_; }
  bool is_exact() const { return exact_; }
  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  std::string to_string() const;

  /// Sign of (this - num/den). For inexact exponents within 1e-12 of the
  /// target this throws std::invalid_argument, because the answer is not
  /// decidable in floating point.
  int compare(std::int64_t num, std::int64_t den) const;

 private:
  double value_ = 0.0;
  bool exact_ = false;
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

enum class NonlinearityFamily { DoublePower, RationalBlend, PurePower };

std::string_view to_string(NonlinearityFamily f);
/// Accepts "double", "rational", "pure" (and the enum spellings).
NonlinearityFamily parse_family(std::string_view text);

struct NonlinearityParams {
  Exponent alpha{3.0};
  Exponent beta{3.0};
  double mu1 = 1.0;
  double mu2 = 1.0;
  NonlinearityFamily family = NonlinearityFamily::PurePower;

  static NonlinearityParams pure(Exponent p, double mu = 1.0) {
    return {p, p, mu, mu, NonlinearityFamily::PurePower};
  }
  static NonlinearityParams double_power(Exponent alpha, Exponent beta,
                                         double mu1 = 1.0, double mu2 = 1.0) {
    return {alpha, beta, mu1, mu2, NonlinearityFamily::DoublePower};
  }
  static NonlinearityParams rational_blend(Exponent alpha, Exponent beta,
                                           double mu1 = 1.0, double mu2 = 1.0) {
    return {alpha, beta, mu1, mu2, NonlinearityFamily::RationalBlend};
  }
};

struct NonlinearityValue {
  double g = 0.0;
  double G = 0.0;
  double gprime = 0.0;
};

/// Evaluator for g, its primitive G and g'. Construction validates the
/// family constraints (alpha, beta > 2, weights positive, ordering per family).
///
///   DoublePower   g(s) = mu1 s^(alpha-1) + mu2 s^(beta-1)          alpha <= beta
///   RationalBlend g(s) = mu1 s^(alpha-1) / (1 + (mu1/mu2) s^(alpha-beta)) alpha > beta
///   PurePower     g(s) = mu1 s^(alpha-1)                            alpha == beta
class Nonlinearity {
 public:
  explicit Nonlinearity(const NonlinearityParams& params);

  const NonlinearityParams& params() const { return params_; }

  double g(double s) const;
  double gprime(double s) const;
  /// Closed form for the power families, adaptive Gauss-Kronrod otherwise.
  double G(double s) const;
  NonlinearityValue evaluate(double s) const;

 private:
  NonlinearityParams params_;
  double alpha_;
  double beta_;
  double ratio_;  // mu1/mu2
};

/// Rejects s < 0 with std::invalid_argument.
NonlinearityValue evaluate_nonlinearity(const NonlinearityParams& params, double s);

/// Kirchhoff constants, dimension and nonlinearity. The constructor checks
/// a, b > 0, n >= 1 and alpha, beta in (2, 2*) for this n.
class ProblemParams {
 public:
  ProblemParams(double a, double b, int n, NonlinearityParams nonlinearity);

  double a() const { return a_; }
  double b() const { return b_; }
  int n() const { return n_; }
  const NonlinearityParams& nonlinearity_params() const { return params_; }
  const Nonlinearity& nonlinearity() const { return nonlinearity_; }

  /// Same a, b, n with a different nonlinearity.
  ProblemParams with_nonlinearity(NonlinearityParams params) const {
    return ProblemParams(a_, b_, n_, std::move(params));
  }

 private:
  double a_;
  double b_;
  int n_;
  NonlinearityParams params_;
  Nonlinearity nonlinearity_;
};

/// Sobolev exponent 2N/(N-2); +infinity for N <= 2.
double sobolev_exponent(int n);

enum class IClass { I1, I2, I3 };
enum class JClass { J1, J2, J3 };

std::string_view to_string(IClass c);
std::string_view to_string(JClass c);

enum class PredictionKind {
  ExistsForAllC,
  ExistsAboveThreshold,
  ExistsBelowThreshold,
  TwoSolutionsRange,
  Window,
};

enum class Nonexistence { None, Below, Above, BelowAndAbove };

std::string_view to_string(PredictionKind k);
std::string_view to_string(Nonexistence k);

/// Norms of the unit pure-power ground state U_q (-Lap U + U = U^q, q = p-1).
struct PurePowerNorms {
  double l2sq = 0.0;
  double gradsq = 0.0;
};

/// Inputs for the closed-form endpoint masses. Only the entries needed by the
/// regime have to be present.
struct EndpointNormData {
  std::optional<PurePowerNorms> u_alpha;  // U_{alpha-1}
  std::optional<PurePowerNorms> u_beta;   // U_{beta-1}
  /// Semilinear ground state at lambda* (N >= 5): (|v|_2^2, |grad v|_2^2).
  std::optional<std::pair<double, double>> star;
};

struct Threshold {
  std::string name;
  std::string formula;
  std::optional<double> value;
};

struct Prediction {
  PredictionKind kind = PredictionKind::ExistsForAllC;
  Nonexistence nonexistence = Nonexistence::None;
  std::string statement;
};

struct RegimeReport {
  int n = 0;
  IClass i_class = IClass::I1;
  JClass j_class = JClass::J1;
  std::string cell;        // "K13" for N <= 3, "I3" for N >= 4
  std::string case_label;  // e.g. "Theorem 1.1(6)"
  std::vector<Threshold> thresholds;
  Prediction prediction;
  std::vector<std::string> notes;
};

IClass classify_alpha(const Exponent& alpha, int n);
JClass classify_beta(const Exponent& beta, int n);

/// Regime cell and existence/multiplicity prediction. Threshold values are
/// filled in when `norms` carries what they need.
RegimeReport classify_regime(const ProblemParams& pp,
                             const EndpointNormData* norms = nullptr);

enum class UpperEndKind { LambdaInfinity, SStar };

struct AsymptoticPrediction {
  /// lambda -> 0 limit of the mass on the single family (N <= 4) or on the
  /// upper family t2 (N >= 5).
  double mass_at_zero = 0.0;
  /// N >= 5 only: the lower family t1 always diverges as lambda -> 0.
  std::optional<double> lower_mass_at_zero;
  /// lambda -> infinity limit (N <= 3) or the lambda* value (N >= 4). Empty
  /// when the lambda* data was not supplied.
  std::optional<double> mass_at_upper_end;
  std::optional<double> sigma;
  std::optional<double> eta;
  UpperEndKind upper_end_kind = UpperEndKind::LambdaInfinity;
};

/// Endpoint limits of the mass curve. Infinite limits are +infinity.
AsymptoticPrediction predicted_endpoint_masses(const ProblemParams& pp,
                                               const EndpointNormData& norms);

/// b^{N/(4-N)} (|grad V|^2)^{N/(4-N)} |V|^2 with V the mu2-weighted
/// beta ground state. Throws std::domain_error for N >= 4, where the branch
/// ends at lambda* instead of lambda = infinity.
double lambda_infinity_mass_limit(const ProblemParams& pp, const PurePowerNorms& u_beta);

/// a^{N/2} mu1^{-2/(alpha-2)} |U_{alpha-1}|^2.
double mass_critical_limit(const ProblemParams& pp, const PurePowerNorms& u_alpha);

/// (8 - N(beta-2)) / ((beta-2)(4-N)), N <= 3. Exactly zero on J2.
double sigma_exponent(const ProblemParams& pp);
/// -4 / ((N-2)(alpha-2)), N >= 5.
double eta_exponent(const ProblemParams& pp);

}  // namespace kirchhoff
