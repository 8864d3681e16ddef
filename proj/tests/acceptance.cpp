// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// numbers and runtime. Sub-checks are printed indented underneath.

#include "kirchhoff/branch.hpp"
#include "kirchhoff/io.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace kirchhoff;

namespace {

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

ProblemParams pure_problem(int n, const char* p, double a = 1.0, double b = 1.0) {
  return ProblemParams(a, b, n, NonlinearityParams::pure(Exponent::parse(p)));
}

// Every accepted ground state seen by criteria 1-9, for criterion 10.
struct Ledger {
  std::vector<double> pohozaev;
  std::vector<const MassCurve*> curves;
  double max_requad = 0.0;
} ledger;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void sub(Outcome& o, bool ok, const std::string& what) {
  o.pass = o.pass && ok;
  std::printf("    %s %s\n", ok ? "ok  " : "FAIL", what.c_str());
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

void record(const MassCurve& c) {
  for (const auto& s : c.samples) ledger.pohozaev.push_back(s.pohozaev);
  ledger.curves.push_back(&c);
}

void record(const RadialProfile& v) { ledger.pohozaev.push_back(v.diagnostics.pohozaev_rel_residual); }

// ---------------------------------------------------------------------------

Outcome soliton_oracle() {
  Outcome o;
  struct Case {
    const char* p;
    double amp;
    double l2sq;
  } cases[] = {{"4", std::sqrt(2.0), 4.0}, {"6", std::pow(3.0, 0.25), std::sqrt(3.0) * M_PI / 2.0}};
  for (const auto& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto v = solve_ground_state(pure_problem(1, c.p), 1.0);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    record(v);
    sub(o, rel(v.amplitude(), c.amp) < 1e-6,
        "q=" + std::to_string(std::atoi(c.p) - 1) + " v(0) rel err " + fmt("%.2e", rel(v.amplitude(), c.amp)));
    sub(o, rel(v.norms.l2sq, c.l2sq) < 1e-6, "   |v|^2 rel err " + fmt("%.2e", rel(v.norms.l2sq, c.l2sq)));
    sub(o, dt < 1.0, "   solve time " + fmt("%.3f s", dt));
  }
  return o;
}

Outcome fibering_exactness() {
  Outcome o;
  oracle::Draw d(2024);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const int n = d.integer(1, 6);
    const double a = d.log_uniform(1e-2, 1e2), b = d.log_uniform(1e-2, 1e2), g = d.log_uniform(1e-6, 1e6);
    for (double t : scaling_roots(a, b, g, n).roots) worst = std::max(worst, std::abs(fibering_value(a, b, g, n, t)));
  }
  sub(o, worst < 1e-12, "max |f(t)| over 1e4 draws " + fmt("%.2e", worst));
  int mismatches = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = d.integer(1, 6);
    const double a = d.log_uniform(0.1, 10), b = d.log_uniform(0.1, 10), g = d.log_uniform(1e-4, 1e4);
    if (static_cast<int>(scaling_roots(a, b, g, n).roots.size()) != oracle::scan_root_count(a, b, g, n)) ++mismatches;
  }
  sub(o, mismatches == 0, "root-count mismatches vs 1e6-point scan: " + std::to_string(mismatches) + "/100");
  const auto r = scaling_roots(1, 1, 2.0 * std::pow(3.0, -1.5), 5);
  const double err = r.roots.empty() ? 1.0 : std::abs(r.roots[0] - 1.0 / std::sqrt(3.0));
  sub(o, err < 1e-8, "N=5 double root |t - 3^{-1/2}| " + fmt("%.2e", err));
  return o;
}

Outcome rescaling_identity() {
  Outcome o;
  struct Set {
    int n;
    const char* p;
    double lo, hi;
  } sets[] = {{1, "4", 1e-2, 1e2}, {3, "4", 1e-2, 1e2}, {4, "3", 1e-5, 1e-3}, {5, "3", 1e-12, 1e-9}};
  int samples = 0;
  double worst_res = 0.0, worst_trip = 0.0;
  for (const auto& s : sets) {
    const auto pp = pure_problem(s.n, s.p);
    for (double lambda : log_grid(s.lo, s.hi, 5)) {
      const auto v = solve_ground_state(pp, lambda);
      record(v);
      for (double t : scaling_roots(pp.a(), pp.b(), v.norms.gradsq, s.n).roots) {
        ++samples;
        const auto u = apply_scaling(v, t, pp.a(), pp.b());
        worst_res = std::max(worst_res, kirchhoff_residual(u, lambda, pp.a(), pp.b(), pp.nonlinearity()));
        const auto back = invert_scaling(u, pp.a(), pp.b());
        for (std::size_t i = 0; i < v.size(); ++i)
          worst_trip = std::max(worst_trip, std::abs(back.v.values[i] - v.values[i]));
        const auto q = radial_norms(u, pp.nonlinearity());
        ledger.max_requad = std::max({ledger.max_requad, rel(q.l2sq, u.norms.l2sq), rel(q.gradsq, u.norms.gradsq)});
      }
    }
  }
  sub(o, samples >= 20, "branch samples " + std::to_string(samples));
  sub(o, worst_res < 1e-5, "max Kirchhoff residual " + fmt("%.2e", worst_res));
  sub(o, worst_trip < 1e-10, "max round-trip deviation " + fmt("%.2e", worst_trip));
  return o;
}

Outcome mass_critical_endpoint() {
  Outcome o;
  const auto pp = pure_problem(3, "10/3", 2.0, 1.0);
  const auto u = solve_ground_state(pure_problem(3, "10/3"), 1.0);
  record(u);
  const double target = std::pow(2.0, 1.5) * u.norms.l2sq;
  static const MassCurve c = trace_branch(pp, 1e-3, 1e3, 16);
  record(c);
  const auto& s = c.samples.front();
  sub(o, rel(s.mass, target) < 0.02,
      "mass at lambda=1e-3 " + fmt("%.6g", s.mass) + " vs " + fmt("%.6g", target) + ", deviation " +
          fmt("%.2f%%", 100 * rel(s.mass, target)));
  // Informational: the deviation is O(lambda), so smaller lambda closes in.
  for (double lambda : {1e-4, 1e-5}) {
    const auto v = solve_ground_state(pp, lambda);
    record(v);
    const auto smp = samples_from_profile(pp, v, scaling_roots(pp.a(), pp.b(), v.norms.gradsq, 3));
    std::printf("    info lambda=%g mass %.6g, deviation %.2f%%\n", lambda, smp[0].mass,
                100 * rel(smp[0].mass, target));
  }
  return o;
}

Outcome kirchhoff_critical_endpoint() {
  Outcome o;
  const auto pp = pure_problem(3, "14/3");
  static const MassCurve c = trace_branch(pp, 1e-1, 1e3, 32);
  record(c);
  const double target = lambda_infinity_mass_limit(pp, unit_pure_power_norms(14.0 / 3.0, 3));
  const auto& s = c.samples.back();
  sub(o, rel(s.mass, target) < 0.05,
      "mass at lambda=1e3 " + fmt("%.6g", s.mass) + " vs " + fmt("%.6g", target) + ", deviation " +
          fmt("%.2e", rel(s.mass, target)));
  const double sigma = sigma_exponent(pp);
  const double slope = loglog_slope(c.samples, 1e2, 1e3);
  // sigma is exactly zero here, so "10%" is taken as an absolute 0.1
  const double tol = sigma == 0.0 ? 0.1 : 0.1 * std::abs(sigma);
  sub(o, std::abs(slope - sigma) <= tol,
      "top-decade slope " + fmt("%.4f", slope) + " vs sigma " + fmt("%.4f", sigma));
  return o;
}

Outcome four_dim_blowup() {
  Outcome o;
  const auto pp = pure_problem(4, "3");
  static const MassCurve c = trace_branch(pp, 1e-4, 1e4, 64);
  record(c);
  sub(o, c.star.has_value(), "lambda* detected");
  if (!c.star) return o;
  const double width = (c.star->lambda_hi - c.star->lambda_lo) / c.star->lambda_lo;
  sub(o, width <= 1e-6, "lambda*=" + fmt("%.8g", c.star->lambda) + " bracket width " + fmt("%.2e", width));
  sub(o, c.families() == std::vector<Family>{Family::Only}, "single family");
  const int k = BranchConfig{}.refine_points;
  const std::size_t first = c.samples.size() > static_cast<std::size_t>(k) ? c.samples.size() - k : 0;
  bool increasing = true;
  for (std::size_t i = first + 1; i < c.samples.size(); ++i) increasing &= c.samples[i].mass > c.samples[i - 1].mass;
  double mn = c.samples.front().mass;
  for (const auto& s : c.samples) mn = std::min(mn, s.mass);
  sub(o, increasing, "mass strictly increasing over the final " + std::to_string(k) + " refined points");
  sub(o, c.samples.back().mass > 10 * mn,
      "final mass " + fmt("%.4g", c.samples.back().mass) + " vs curve min " + fmt("%.4g", mn));
  return o;
}

const MassCurve& five_dim_curve() {
  static const MassCurve c = trace_branch(pure_problem(5, "3"), 1e-4, 1e4, 64);
  return c;
}

Outcome two_families() {
  Outcome o;
  const auto pp = pure_problem(5, "3");
  const auto& c = five_dim_curve();
  record(c);
  for (const auto& w : c.warnings) std::printf("    note %s\n", w.c_str());
  const auto lower = c.family(Family::Lower), upper = c.family(Family::Upper);
  sub(o, c.star && !lower.empty() && !upper.empty(),
      "two families, " + std::to_string(lower.size()) + " samples each");
  if (!c.star || lower.empty() || upper.empty()) return o;
  const double ml = lower.back().mass, mu = upper.back().mass;
  sub(o, rel(ml, mu) < 0.01, "families at lambda* agree to " + fmt("%.2e", rel(ml, mu)));

  const int n = 5;
  const double v2 = c.star->profile.norms.l2sq;
  const double literal = std::pow(pp.b() * (n - 4) / (2 * pp.a()), -double(n) / (n - 2)) * v2;
  const double mid = 0.5 * (ml + mu);
  sub(o, rel(mid, literal) < 0.02,
      "literal (b(N-4)/2a)^{-N/(N-2)}|v*|^2 = " + fmt("%.6g", literal) + " vs observed " + fmt("%.6g", mid));
  const double corrected = *c.endpoint_prediction->mass_at_upper_end;
  std::printf("    info with the gamma*^{-N/(N-2)} factor: %.6g, deviation %.2e\n", corrected, rel(mid, corrected));

  const double lo = lower.front().lambda;
  const double slope = loglog_slope(lower, lo, 10 * lo);
  const double eta = eta_exponent(pp);
  sub(o, std::abs(slope - eta) <= 0.1 * std::abs(eta),
      "lower-family low-lambda slope " + fmt("%.4f", slope) + " vs eta " + fmt("%.4f", eta));
  return o;
}

Outcome multiplicity() {
  Outcome o;
  const ProblemParams pp(1, 1, 1, NonlinearityParams::double_power(Exponent::parse("4"), Exponent::parse("12")));
  static const MassCurve c = trace_branch(pp, 1e-4, 1e4, 64);
  record(c);
  double mx = 0.0;
  for (const auto& s : c.samples) mx = std::max(mx, s.mass);
  const double target = mx / 2;
  const auto r = solve_for_mass(pp, target, c);
  sub(o, r.solutions.size() >= 2, std::to_string(r.solutions.size()) + " solutions at c=" + fmt("%.6g", target));
  if (r.solutions.size() >= 2) {
    const double ratio = r.solutions.back().lambda / r.solutions.front().lambda;
    sub(o, ratio > 1.1, "lambda ratio " + fmt("%.4g", ratio));
  }
  for (const auto& s : r.solutions) {
    const double m = radial_norms(s.profile, pp.nonlinearity()).l2sq;
    sub(o, rel(m, target) < 1e-6, "lambda=" + fmt("%.6g", s.lambda) + " re-verified mass error " + fmt("%.2e", rel(m, target)));
  }
  return o;
}

Outcome nonexistence() {
  Outcome o;
  const auto pp = pure_problem(5, "3");
  const auto& c = five_dim_curve();
  double m = INFINITY;
  for (const auto& s : c.samples) m = std::min(m, s.mass);
  sub(o, m > 0.0 && std::isfinite(m), "curve infimum m=" + fmt("%.6g", m));
  const auto r = solve_for_mass(pp, m / 2, c);
  sub(o, r.solutions.empty() && r.failures.empty(), "solve_for_mass at m/2 returned " + std::to_string(r.solutions.size()));
  const auto summary = io::curve_summary(c);
  sub(o, summary["empirical_thresholds"]["curve_min_mass"].get<double>() == m, "report records m as empirical threshold");
  return o;
}

Outcome identities() {
  Outcome o;
  double worst = 0.0;
  for (double p : ledger.pohozaev) worst = std::max(worst, p);
  sub(o, worst < 1e-6, "max Pohozaev residual over " + std::to_string(ledger.pohozaev.size()) +
                           " ground states " + fmt("%.2e", worst));
  double alg = 0.0;
  for (const auto* c : ledger.curves)
    for (const auto& s : c->samples) {
      alg = std::max(alg, rel(s.mass, std::pow(s.t, -c->n) * s.v_l2sq));
      alg = std::max(alg, rel(s.gradsq, std::pow(s.t, 2.0 - c->n) * s.v_gradsq));
    }
  sub(o, alg < 1e-12, "algebraic rescaling identity " + fmt("%.2e", alg));
  sub(o, ledger.max_requad < 1e-10, "re-quadrature of rescaled profiles " + fmt("%.2e", ledger.max_requad));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"soliton oracle N=1", soliton_oracle},
      {"fibering-root exactness", fibering_exactness},
      {"rescaled solutions solve the Kirchhoff equation", rescaling_identity},
      {"mass-critical endpoint N=3", mass_critical_endpoint},
      {"Kirchhoff-critical endpoint N=3", kirchhoff_critical_endpoint},
      {"N=4 blow-up at lambda*", four_dim_blowup},
      {"N=5 two-family structure", two_families},
      {"multiplicity N=1 double power", multiplicity},
      {"nonexistence below the curve infimum N=5", nonexistence},
      {"identity suite", identities},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::printf("criterion %zu: %s\n", i + 1, criteria[i].first);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      std::printf("    FAIL exception: %s\n", e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu (%.2f s)\n\n", o.pass ? "PASS" : "FAIL", i + 1, dt);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
