#include "kirchhoff/model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace kirchhoff {

namespace {

constexpr double kInexactTieTol = 1e-12;

std::int64_t checked_pow10(int k) {
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r *= 10;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Exponent

Exponent Exponent::rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("exponent: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  Exponent e(static_cast<double>(num) / static_cast<double>(den));
  e.exact_ = true;
  e.num_ = num / g;
  e.den_ = den / g;
  e.value_ = static_cast<double>(e.num_) / static_cast<double>(e.den_);
  return e;
}

Exponent Exponent::parse(std::string_view text) {
  auto bad = [&] {
    return std::invalid_argument("cannot parse exponent '" + std::string(text) + "'");
  };
  if (text.empty()) throw bad();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::int64_t p = 0, q = 0;
    auto lhs = text.substr(0, slash);
    auto rhs = text.substr(slash + 1);
    auto r1 = std::from_chars(lhs.data(), lhs.data() + lhs.size(), p);
    auto r2 = std::from_chars(rhs.data(), rhs.data() + rhs.size(), q);
    if (r1.ec != std::errc() || r1.ptr != lhs.data() + lhs.size() ||
        r2.ec != std::errc() || r2.ptr != rhs.data() + rhs.size() || q == 0)
      throw bad();
    return rational(p, q);
  }

  // Plain decimal "d+[.d*]" is an exact rational; anything else (exponent
  // notation, very long mantissas) falls back to an inexact double.
  bool plain = true;
  std::size_t dot = std::string_view::npos;
  std::size_t digits = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.' && dot == std::string_view::npos) {
      dot = i;
    } else if (c >= '0' && c <= '9') {
      ++digits;
    } else {
      plain = false;
      break;
    }
  }
  if (plain && digits > 0 && digits <= 17) {
    std::string mantissa;
    for (char c : text)
      if (c != '.') mantissa.push_back(c);
    std::int64_t m = 0;
    auto r = std::from_chars(mantissa.data(), mantissa.data() + mantissa.size(), m);
    if (r.ec == std::errc()) {
      const int frac = dot == std::string_view::npos
                           ? 0
                           : static_cast<int>(text.size() - dot - 1);
      return rational(m, checked_pow10(frac));
    }
  }

  double v = 0.0;
  auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) throw bad();
  return Exponent(v);
}

std::string Exponent::to_string() const {
  if (exact_) {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

int Exponent::compare(std::int64_t num, std::int64_t den) const {
  if (exact_) {
    const __int128 lhs = static_cast<__int128>(num_) * den;
    const __int128 rhs = static_cast<__int128>(num) * den_;
    return (lhs > rhs) - (lhs < rhs);
  }
  const double target = static_cast<double>(num) / static_cast<double>(den);
  const double diff = value_ - target;
  if (std::abs(diff) <= kInexactTieTol)
    throw std::invalid_argument("exponent " + to_string() +
                                " lies within 1e-12 of a critical value; pass it as a rational");
  return diff > 0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// Nonlinearity

std::string_view to_string(NonlinearityFamily f) {
  switch (f) {
    case NonlinearityFamily::DoublePower: return "double";
    case NonlinearityFamily::RationalBlend: return "rational";
    case NonlinearityFamily::PurePower: return "pure";
  }
  return "?";
}

NonlinearityFamily parse_family(std::string_view text) {
  if (text == "double" || text == "DoublePower") return NonlinearityFamily::DoublePower;
  if (text == "rational" || text == "RationalBlend") return NonlinearityFamily::RationalBlend;
  if (text == "pure" || text == "PurePower") return NonlinearityFamily::PurePower;
  throw std::invalid_argument("unknown nonlinearity family '" + std::string(text) + "'");
}

Nonlinearity::Nonlinearity(const NonlinearityParams& params)
    : params_(params),
      alpha_(params.alpha.value()),
      beta_(params.beta.value()),
      ratio_(params.mu1 / params.mu2) {
  if (!(alpha_ > 2.0) || !(beta_ > 2.0))
    throw std::invalid_argument("exponents must exceed 2");
  if (!(params.mu1 > 0.0) || !(params.mu2 > 0.0))
    throw std::invalid_argument("weights mu1, mu2 must be positive");
  // Order checks go through Exponent::compare so rational ties are exact.
  auto cmp = [&] {
    const auto& b = params.beta;
    if (b.is_exact()) return params.alpha.compare(b.num(), b.den());
    if (params.alpha.is_exact()) return -b.compare(params.alpha.num(), params.alpha.den());
    const double d = alpha_ - beta_;
    return (d > 0) - (d < 0);
  };
  switch (params.family) {
    case NonlinearityFamily::DoublePower:
      if (cmp() > 0) throw std::invalid_argument("DoublePower requires alpha <= beta");
      break;
    case NonlinearityFamily::RationalBlend:
      if (cmp() <= 0) throw std::invalid_argument("RationalBlend requires alpha > beta");
      break;
    case NonlinearityFamily::PurePower:
      if (cmp() != 0 || params.mu1 != params.mu2)
        throw std::invalid_argument("PurePower requires alpha == beta and mu1 == mu2");
      break;
  }
}

double Nonlinearity::g(double s) const {
  if (s <= 0.0) return 0.0;
  const auto& p = params_;
  switch (p.family) {
    case NonlinearityFamily::PurePower:
      return p.mu1 * std::pow(s, alpha_ - 1.0);
    case NonlinearityFamily::DoublePower:
      return p.mu1 * std::pow(s, alpha_ - 1.0) + p.mu2 * std::pow(s, beta_ - 1.0);
    case NonlinearityFamily::RationalBlend: {
      const double w = ratio_ * std::pow(s, alpha_ - beta_);
      if (w <= 1.0) return p.mu1 * std::pow(s, alpha_ - 1.0) / (1.0 + w);
      return p.mu2 * std::pow(s, beta_ - 1.0) / (1.0 + 1.0 / w);
    }
  }
  return 0.0;
}

double Nonlinearity::gprime(double s) const {
  if (s < 0.0) return 0.0;
  const auto& p = params_;
  if (s == 0.0) return 0.0;  // alpha > 2
  switch (p.family) {
    case NonlinearityFamily::PurePower:
      return p.mu1 * (alpha_ - 1.0) * std::pow(s, alpha_ - 2.0);
    case NonlinearityFamily::DoublePower:
      return p.mu1 * (alpha_ - 1.0) * std::pow(s, alpha_ - 2.0) +
             p.mu2 * (beta_ - 1.0) * std::pow(s, beta_ - 2.0);
    case NonlinearityFamily::RationalBlend: {
      // g = mu1 s^(alpha-1) / (1+w), w = (mu1/mu2) s^(alpha-beta)
      // g' = g/s * [(alpha-1) - (alpha-beta) w/(1+w)]
      const double w = ratio_ * std::pow(s, alpha_ - beta_);
      const double frac = w <= 1.0 ? w / (1.0 + w) : 1.0 / (1.0 + 1.0 / w);
      return g(s) / s * ((alpha_ - 1.0) - (alpha_ - beta_) * frac);
    }
  }
  return 0.0;
}

double Nonlinearity::G(double s) const {
  if (s <= 0.0) return 0.0;
  const auto& p = params_;
  switch (p.family) {
    case NonlinearityFamily::PurePower:
      return p.mu1 * std::pow(s, alpha_) / alpha_;
    case NonlinearityFamily::DoublePower:
      return p.mu1 * std::pow(s, alpha_) / alpha_ + p.mu2 * std::pow(s, beta_) / beta_;
    case NonlinearityFamily::RationalBlend: {
      // G(s) = s * int_0^1 g(s w) dw
      auto f = [&](double w) { return g(s * w); };
      const double integral =
          boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 15, 1e-14);
      return s * integral;
    }
  }
  return 0.0;
}

NonlinearityValue Nonlinearity::evaluate(double s) const { return {g(s), G(s), gprime(s)}; }

NonlinearityValue evaluate_nonlinearity(const NonlinearityParams& params, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("nonlinearity evaluated at negative s");
  return Nonlinearity(params).evaluate(s);
}

// ---------------------------------------------------------------------------
// ProblemParams

double sobolev_exponent(int n) {
  if (n <= 2) return std::numeric_limits<double>::infinity();
  return 2.0 * n / (n - 2.0);
}

namespace {

void check_subcritical(const Exponent& e, int n, const char* name) {
  if (n <= 2) return;
  if (e.compare(2 * n, n - 2) >= 0)
    throw std::invalid_argument(std::string(name) + " = " + e.to_string() +
                                " is not below the Sobolev exponent 2N/(N-2)");
}

}  // namespace

ProblemParams::ProblemParams(double a, double b, int n, NonlinearityParams nonlinearity)
    : a_(a), b_(b), n_(n), params_(std::move(nonlinearity)), nonlinearity_(params_) {
  if (!(a > 0.0)) throw std::invalid_argument("Kirchhoff constant a must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("Kirchhoff constant b must be positive");
  if (n < 1) throw std::invalid_argument("dimension must be at least 1");
  check_subcritical(params_.alpha, n, "alpha");
  check_subcritical(params_.beta, n, "beta");
}

// ---------------------------------------------------------------------------
// Regime classification

std::string_view to_string(IClass c) {
  switch (c) {
    case IClass::I1: return "I1";
    case IClass::I2: return "I2";
    case IClass::I3: return "I3";
  }
  return "?";
}

std::string_view to_string(JClass c) {
  switch (c) {
    case JClass::J1: return "J1";
    case JClass::J2: return "J2";
    case JClass::J3: return "J3";
  }
  return "?";
}

std::string_view to_string(PredictionKind k) {
  switch (k) {
    case PredictionKind::ExistsForAllC: return "exists-for-all-c";
    case PredictionKind::ExistsAboveThreshold: return "exists-above-threshold";
    case PredictionKind::ExistsBelowThreshold: return "exists-below-threshold";
    case PredictionKind::TwoSolutionsRange: return "two-solutions-range";
    case PredictionKind::Window: return "window";
  }
  return "?";
}

std::string_view to_string(Nonexistence k) {
  switch (k) {
    case Nonexistence::None: return "none";
    case Nonexistence::Below: return "none-below";
    case Nonexistence::Above: return "none-above";
    case Nonexistence::BelowAndAbove: return "none-below-and-above";
  }
  return "?";
}

IClass classify_alpha(const Exponent& alpha, int n) {
  // 2 + 4/N = (2N + 4)/N
  const int c = alpha.compare(2 * n + 4, n);
  return c < 0 ? IClass::I1 : (c == 0 ? IClass::I2 : IClass::I3);
}

JClass classify_beta(const Exponent& beta, int n) {
  // 2 + 8/N = (2N + 8)/N
  const int c = beta.compare(2 * n + 8, n);
  return c < 0 ? JClass::J1 : (c == 0 ? JClass::J2 : JClass::J3);
}

double mass_critical_limit(const ProblemParams& pp, const PurePowerNorms& u_alpha) {
  const double n = pp.n();
  const double alpha = pp.nonlinearity_params().alpha.value();
  const double mu1 = pp.nonlinearity_params().mu1;
  return std::pow(pp.a(), n / 2.0) * std::pow(mu1, -2.0 / (alpha - 2.0)) * u_alpha.l2sq;
}

double lambda_infinity_mass_limit(const ProblemParams& pp, const PurePowerNorms& u_beta) {
  const int n = pp.n();
  if (n >= 4)
    throw std::domain_error("no lambda -> infinity mass limit for N >= 4: the branch ends at lambda*");
  const double beta = pp.nonlinearity_params().beta.value();
  const double scale = std::pow(pp.nonlinearity_params().mu2, -2.0 / (beta - 2.0));
  const double v_l2 = scale * u_beta.l2sq;
  const double v_grad = scale * u_beta.gradsq;
  const double e = static_cast<double>(n) / (4.0 - n);
  return std::pow(pp.b(), e) * std::pow(v_grad, e) * v_l2;
}

double sigma_exponent(const ProblemParams& pp) {
  const int n = pp.n();
  if (n >= 4) throw std::domain_error("sigma is defined only for N <= 3");
  if (classify_beta(pp.nonlinearity_params().beta, n) == JClass::J2) return 0.0;
  const double beta = pp.nonlinearity_params().beta.value();
  return (8.0 - n * (beta - 2.0)) / ((beta - 2.0) * (4.0 - n));
}

double eta_exponent(const ProblemParams& pp) {
  const int n = pp.n();
  if (n < 5) throw std::domain_error("eta is defined only for N >= 5");
  const double alpha = pp.nonlinearity_params().alpha.value();
  return -4.0 / ((n - 2.0) * (alpha - 2.0));
}

namespace {

double star_mass(const ProblemParams& pp, double v_l2sq, double v_gradsq) {
  // Both root families meet at t* = (b(N-4) gamma / (2a))^{1/(N-2)}, so the
  // mass there is t*^{-N} |v|^2.
  const double n = pp.n();
  const double base = pp.b() * (n - 4.0) * v_gradsq / (2.0 * pp.a());
  return std::pow(base, -n / (n - 2.0)) * v_l2sq;
}

}  // namespace

RegimeReport classify_regime(const ProblemParams& pp, const EndpointNormData* norms) {
  const int n = pp.n();
  const auto& np = pp.nonlinearity_params();
  RegimeReport r;
  r.n = n;
  r.i_class = classify_alpha(np.alpha, n);
  r.j_class = classify_beta(np.beta, n);

  const int i = static_cast<int>(r.i_class) + 1;
  const int j = static_cast<int>(r.j_class) + 1;

  auto add_cu = [&] {
    Threshold t{"mass_critical_limit", "a^{N/2} mu1^{-2/(alpha-2)} |U_{alpha-1}|_2^2", std::nullopt};
    if (norms && norms->u_alpha) t.value = mass_critical_limit(pp, *norms->u_alpha);
    r.thresholds.push_back(std::move(t));
    r.notes.push_back(
        "mass_critical_limit carries a^{N/2}, the lambda->0 limit of the branch mass; "
        "an a^N form of this threshold is inconsistent with that limit");
  };
  auto add_cv = [&] {
    Threshold t{"kirchhoff_critical_limit",
                "b^{N/(4-N)} (|grad V|_2^2)^{N/(4-N)} |V|_2^2", std::nullopt};
    if (norms && norms->u_beta) t.value = lambda_infinity_mass_limit(pp, *norms->u_beta);
    r.thresholds.push_back(std::move(t));
  };

  auto& pred = r.prediction;
  if (n <= 3) {
    r.cell = "K" + std::to_string(i) + std::to_string(j);
    static const int clause[3][3] = {{1, 4, 6}, {2, 9, 7}, {3, 5, 8}};
    r.case_label = "Theorem 1.1(" + std::to_string(clause[i - 1][j - 1]) + ")";
    switch (clause[i - 1][j - 1]) {
      case 1:
      case 8:
        pred = {PredictionKind::ExistsForAllC, Nonexistence::None,
                "a positive normalized solution exists for every c > 0"};
        break;
      case 2:
        add_cu();
        pred = {PredictionKind::ExistsAboveThreshold, Nonexistence::Below,
                "a solution exists for c > mass_critical_limit; none for c below some c* <= mass_critical_limit"};
        break;
      case 3:
        pred = {PredictionKind::TwoSolutionsRange, Nonexistence::Below,
                "at least two solutions for c > c*; none for c < m (m <= c*)"};
        break;
      case 4:
        add_cv();
        pred = {PredictionKind::ExistsBelowThreshold, Nonexistence::Above,
                "a solution exists for c < kirchhoff_critical_limit; none for c above some c* > kirchhoff_critical_limit"};
        break;
      case 5:
        add_cv();
        pred = {PredictionKind::ExistsAboveThreshold, Nonexistence::Below,
                "a solution exists for c > kirchhoff_critical_limit; none for c below some m < kirchhoff_critical_limit"};
        break;
      case 6:
        pred = {PredictionKind::TwoSolutionsRange, Nonexistence::Above,
                "at least two solutions for c in (0, c*); none for c > M (c* <= M)"};
        break;
      case 7:
        add_cu();
        pred = {PredictionKind::ExistsBelowThreshold, Nonexistence::Above,
                "a solution exists for c < mass_critical_limit; none for c above some M >= mass_critical_limit"};
        break;
      case 9:
        add_cu();
        add_cv();
        pred = {PredictionKind::Window, Nonexistence::BelowAndAbove,
                "a solution exists for c between the two limits (when they differ); "
                "none for c in (0, m) or (M, infinity)"};
        break;
    }
  } else {
    r.cell = "I" + std::to_string(i);
    const std::string thm = n == 4 ? "Theorem 1.2" : "Theorem 1.3";
    static const char* roman[3] = {"(i)", "(ii)", "(iii)"};
    r.case_label = thm + roman[i - 1];
    if (r.i_class == IClass::I1) {
      pred = {PredictionKind::ExistsForAllC, Nonexistence::None,
              "a positive normalized solution exists for every c > 0"};
    } else if (r.i_class == IClass::I2) {
      add_cu();
      pred = {PredictionKind::ExistsAboveThreshold, Nonexistence::Below,
              "a solution exists for c > mass_critical_limit; none for c below some c0 > 0"};
    } else {
      if (n >= 5) {
        Threshold t{"c_star_upper_bound", "(b(N-4) |grad v*|_2^2 / (2a))^{-N/(N-2)} |v*|_2^2",
                    std::nullopt};
        if (norms && norms->star)
          t.value = star_mass(pp, norms->star->first, norms->star->second);
        r.thresholds.push_back(std::move(t));
      }
      pred = {PredictionKind::TwoSolutionsRange, Nonexistence::Below,
              "at least two solutions for c > c*; none for c below some c0 > 0"};
    }
    r.notes.push_back("for N >= 4 the prediction does not depend on beta");
  }

  if (np.family == NonlinearityFamily::RationalBlend && n >= 3 &&
      np.alpha.value() - 1.0 > static_cast<double>(n) / (n - 2.0))
    r.notes.push_back("G3 unverified: RationalBlend with alpha-1 > N/(N-2)");
  return r;
}

AsymptoticPrediction predicted_endpoint_masses(const ProblemParams& pp,
                                               const EndpointNormData& norms) {
  const int n = pp.n();
  const auto& np = pp.nonlinearity_params();
  constexpr double inf = std::numeric_limits<double>::infinity();
  AsymptoticPrediction out;

  switch (classify_alpha(np.alpha, n)) {
    case IClass::I1: out.mass_at_zero = 0.0; break;
    case IClass::I2:
      if (!norms.u_alpha)
        throw std::invalid_argument("mass-critical alpha needs the norms of U_{alpha-1}");
      out.mass_at_zero = mass_critical_limit(pp, *norms.u_alpha);
      break;
    case IClass::I3: out.mass_at_zero = inf; break;
  }

  if (n <= 3) {
    out.upper_end_kind = UpperEndKind::LambdaInfinity;
    out.sigma = sigma_exponent(pp);
    switch (classify_beta(np.beta, n)) {
      case JClass::J1: out.mass_at_upper_end = inf; break;
      case JClass::J2:
        if (!norms.u_beta)
          throw std::invalid_argument("Kirchhoff-critical beta needs the norms of U_{beta-1}");
        out.mass_at_upper_end = lambda_infinity_mass_limit(pp, *norms.u_beta);
        break;
      case JClass::J3: out.mass_at_upper_end = 0.0; break;
    }
  } else if (n == 4) {
    out.upper_end_kind = UpperEndKind::SStar;
    out.mass_at_upper_end = inf;
  } else {
    out.upper_end_kind = UpperEndKind::SStar;
    out.lower_mass_at_zero = inf;
    out.eta = eta_exponent(pp);
    if (norms.star) out.mass_at_upper_end = star_mass(pp, norms.star->first, norms.star->second);
  }
  return out;
}

}  // namespace kirchhoff
