#include "kirchhoff/branch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace kirchhoff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Runs body(i) for i in [0, count). body must not throw.
template <class F>
void run_indexed(std::size_t count, ExecutionPolicy policy, F&& body) {
#ifdef _OPENMP
  if (policy == ExecutionPolicy::Parallel) {
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
    return;
  }
#else
  (void)policy;
#endif
  for (std::size_t i = 0; i < count; ++i) body(i);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

BranchPoint evaluate_point(const ProblemParams& pp, double lambda, const ShootConfig& cfg) {
  BranchPoint p;
  p.lambda = lambda;
  try {
    RadialProfile v = solve_ground_state(pp, lambda, cfg);
    p.roots = scaling_roots(pp.a(), pp.b(), v.norms.gradsq, pp.n());
    p.samples = samples_from_profile(pp, v, p.roots);
    p.warnings = v.warnings;
    if (v.diagnostics.pohozaev_rel_residual > 1e-6)
      p.warnings.push_back("Pohozaev residual " + fmt(v.diagnostics.pohozaev_rel_residual) +
                           " above 1e-6 at lambda=" + fmt(lambda));
    for (const auto& s : p.samples)
      if (s.residual > 1e-5)
        p.warnings.push_back("Kirchhoff residual " + fmt(s.residual) + " above 1e-5 at lambda=" +
                             fmt(lambda));
    p.profile = std::move(v);
  } catch (const std::exception& e) {
    p.error = e.what();
    if (p.error.empty()) p.error = "ground-state solve failed";
  }
  return p;
}

/// Amplitude guess at `lambda` from a solve at `from`, using the small-s
/// power law v(0) ~ lambda^{1/(alpha-2)}.
double predict_amplitude(const ProblemParams& pp, double amp, double from, double lambda) {
  const double alpha = pp.nonlinearity_params().alpha.value();
  return amp * std::pow(lambda / from, 1.0 / (alpha - 2.0));
}

RadialProfile solve_hinted(const ProblemParams& pp, double lambda, const ShootConfig& base,
                           std::optional<double> hint) {
  ShootConfig cfg = base;
  cfg.amplitude_hint = hint;
  return solve_ground_state(pp, lambda, cfg);
}

std::optional<double> root_for(const ScalingRoots& roots, int n, Family fam) {
  for (const auto& [f, t] : tag_roots(roots, n))
    if (f == fam) return t;
  return std::nullopt;
}

void add_unique(std::vector<std::string>& out, const std::vector<std::string>& in) {
  for (const auto& w : in)
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Only: return "only";
    case Family::Lower: return "lower";
    case Family::Upper: return "upper";
  }
  return "?";
}

std::string_view to_string(CheckKind k) {
  switch (k) {
    case CheckKind::Finite: return "finite";
    case CheckKind::Divergence: return "divergence";
    case CheckKind::Vanishing: return "vanishing";
    case CheckKind::Agreement: return "agreement";
  }
  return "?";
}

std::vector<std::pair<Family, double>> tag_roots(const ScalingRoots& roots, int n) {
  std::vector<std::pair<Family, double>> out;
  if (n <= 4) {
    for (double t : roots.roots) out.emplace_back(Family::Only, t);
  } else if (roots.roots.size() == 2) {
    out.emplace_back(Family::Lower, roots.roots[0]);
    out.emplace_back(Family::Upper, roots.roots[1]);
  } else if (roots.roots.size() == 1) {
    if (roots.degenerate) out.emplace_back(Family::Lower, roots.roots[0]);
    out.emplace_back(Family::Upper, roots.roots[0]);
  }
  return out;
}

std::vector<BranchSample> samples_from_profile(const ProblemParams& pp, const RadialProfile& v,
                                               const ScalingRoots& roots) {
  std::vector<BranchSample> out;
  for (const auto& [fam, t] : tag_roots(roots, pp.n())) {
    const RadialProfile u = apply_scaling(v, t, pp.a(), pp.b());
    BranchSample s;
    s.lambda = v.lambda;
    s.family = fam;
    s.t = t;
    s.mass = u.norms.l2sq;
    s.gradsq = u.norms.gradsq;
    s.energy = energy_values(u.norms, v.lambda, pp.a(), pp.b()).i_functional;
    s.residual = kirchhoff_residual(u, v.lambda, pp.a(), pp.b(), pp.nonlinearity());
    s.amplitude = v.amplitude();
    s.v_l2sq = v.norms.l2sq;
    s.v_gradsq = v.norms.gradsq;
    s.pohozaev = v.diagnostics.pohozaev_rel_residual;
    out.push_back(s);
  }
  return out;
}

std::vector<BranchPoint> evaluate_branch_points(const ProblemParams& pp,
                                                const std::vector<double>& lambdas,
                                                const ShootConfig& cfg, ExecutionPolicy policy) {
  std::vector<BranchPoint> out(lambdas.size());
  run_indexed(lambdas.size(), policy,
              [&](std::size_t i) { out[i] = evaluate_point(pp, lambdas[i], cfg); });
  return out;
}

LambdaStar detect_lambda_star(const ProblemParams& pp, double lambda_lo, double lambda_hi,
                              const BranchConfig& cfg) {
  if (pp.n() < 4)
    throw BranchError(BranchError::Kind::InvalidArgument, "lambda* exists only for n >= 4");
  if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo))
    throw BranchError(BranchError::Kind::InvalidArgument, "need 0 < lambda_lo < lambda_hi");

  LambdaStar out;
  out.gamma_star = critical_gradient(pp.a(), pp.b(), pp.n());
  const double gs = out.gamma_star;

  RadialProfile v_lo = solve_ground_state(pp, lambda_lo, cfg.shoot);
  RadialProfile v_hi = solve_ground_state(pp, lambda_hi, cfg.shoot);
  if (!(v_lo.norms.gradsq < gs) || !(v_hi.norms.gradsq >= gs)) {
    throw BranchError(BranchError::Kind::NoCrossing,
                      "gradient mass does not cross gamma*=" + fmt(gs) + " between lambda=" +
                          fmt(lambda_lo) + " and " + fmt(lambda_hi));
  }

  double lo = lambda_lo, hi = lambda_hi;
  double amp_lo = v_lo.amplitude();
  double lam_amp = lo;
  while (hi - lo > cfg.star_rel_width * hi) {
    const double mid = 0.5 * (lo + hi);
    const RadialProfile v =
        solve_hinted(pp, mid, cfg.shoot, predict_amplitude(pp, amp_lo, lam_amp, mid));
    ++out.iterations;
    if (v.norms.gradsq < gs) {
      lo = mid;
      amp_lo = v.amplitude();
      lam_amp = mid;
    } else {
      hi = mid;
    }
  }
  out.lambda_lo = lo;
  out.lambda_hi = hi;
  out.lambda = 0.5 * (lo + hi);
  out.profile =
      solve_hinted(pp, out.lambda, cfg.shoot, predict_amplitude(pp, amp_lo, lam_amp, out.lambda));
  out.gamma = out.profile.norms.gradsq;
  return out;
}

std::vector<BranchSample> MassCurve::family(Family f) const {
  std::vector<BranchSample> out;
  for (const auto& s : samples)
    if (s.family == f) out.push_back(s);
  return out;
}

std::vector<Family> MassCurve::families() const {
  std::vector<Family> out;
  for (Family f : {Family::Only, Family::Lower, Family::Upper})
    if (std::any_of(samples.begin(), samples.end(), [f](const auto& s) { return s.family == f; }))
      out.push_back(f);
  return out;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out(points);
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (int i = 0; i < points; ++i) out[i] = std::exp(l0 + (l1 - l0) * i / (points - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

MassCurve trace_branch(const ProblemParams& pp, double lambda_min, double lambda_max, int points,
                       const BranchConfig& cfg) {
  if (!(lambda_min > 0.0) || !(lambda_max > lambda_min))
    throw BranchError(BranchError::Kind::InvalidArgument, "need 0 < lambda_min < lambda_max");
  if (points < 16) throw BranchError(BranchError::Kind::InvalidArgument, "need at least 16 points");

  const int n = pp.n();
  MassCurve curve;
  curve.n = n;
  curve.lambda_min = lambda_min;
  curve.lambda_max = lambda_max;
  curve.points = points;

  for (const auto& note : classify_regime(pp).notes)
    if (note.find("G3") != std::string::npos) curve.warnings.push_back(note);

  std::vector<double> grid = log_grid(lambda_min, lambda_max, points);
  std::vector<BranchPoint> pts = evaluate_branch_points(pp, grid, cfg.shoot, cfg.policy);

  auto take_until = [&](std::size_t end) {
    for (std::size_t i = 0; i < end; ++i) {
      add_unique(curve.warnings, pts[i].warnings);
      curve.samples.insert(curve.samples.end(), pts[i].samples.begin(), pts[i].samples.end());
    }
  };
  auto first_bad = [&](bool stop_on_empty) {
    std::size_t k = 0;
    while (k < pts.size() && pts[k].ok() && !(stop_on_empty && pts[k].roots.roots.empty())) ++k;
    return k;
  };

  if (n <= 3) {
    const std::size_t k = first_bad(false);
    take_until(k);
    if (k < pts.size())
      curve.failure = "ground state failed at lambda=" + fmt(pts[k].lambda) + ": " + pts[k].error;
  } else {
    std::size_t k = first_bad(true);
    try {
      if (k == 0 && pts[0].ok()) {
        // Root set already empty: walk down by decades to bracket lambda*.
        double hi = lambda_min, lo = lambda_min;
        bool found = false;
        for (int d = 0; d < 60 && !found; ++d) {
          hi = lo;
          lo = hi / 10.0;
          const BranchPoint p = evaluate_point(pp, lo, cfg.shoot);
          if (!p.ok())
            throw BranchError(BranchError::Kind::SolverFailure,
                              "ground state failed at lambda=" + fmt(lo) + ": " + p.error);
          found = !p.roots.roots.empty();
        }
        if (!found)
          throw BranchError(BranchError::Kind::NoCrossing, "no lambda with a scaling root found");
        curve.star = detect_lambda_star(pp, lo, hi, cfg);
        const double width = lambda_max / lambda_min;
        const double new_hi = curve.star->lambda;
        grid = log_grid(new_hi / width, new_hi, points);
        grid.pop_back();
        curve.warnings.push_back("lambda window moved below lambda*=" + fmt(new_hi) +
                                 ": requested lambda_min=" + fmt(lambda_min) +
                                 " has no scaling root; sweeping [" + fmt(grid.front()) + ", " +
                                 fmt(new_hi) + ")");
        curve.lambda_min = grid.front();
        curve.lambda_max = new_hi;
        pts = evaluate_branch_points(pp, grid, cfg.shoot, cfg.policy);
        k = first_bad(true);
      }
      if (k < pts.size() && !pts[k].ok()) {
        take_until(k);
        curve.failure = "ground state failed at lambda=" + fmt(pts[k].lambda) + ": " + pts[k].error;
      } else if (k == pts.size()) {
        take_until(k);
        if (!curve.star)
          curve.warnings.push_back("scaling roots exist up to lambda_max=" + fmt(lambda_max) +
                                   "; lambda* not bracketed");
      } else if (k == 0) {
        throw BranchError(BranchError::Kind::NoCrossing,
                          "scaling root set empty at the first grid point");
      } else {
        take_until(k);
        if (!curve.star || curve.star->lambda_lo < grid[k - 1] || curve.star->lambda_hi > grid[k])
          curve.star = detect_lambda_star(pp, grid[k - 1], grid[k], cfg);
        for (std::size_t j = k + 1; j < pts.size(); ++j) {
          if (pts[j].ok() && !pts[j].roots.roots.empty()) {
            curve.warnings.push_back("multiple-crossing: scaling roots reappear at lambda=" +
                                     fmt(pts[j].lambda) + " beyond lambda*=" +
                                     fmt(curve.star->lambda));
            break;
          }
        }
      }

      if (curve.star && k > 0 && k <= pts.size() && cfg.refine_points > 0 &&
          (k == pts.size() || pts[k].ok())) {
        const double last = grid[k - 1];
        const double anchor = curve.star->lambda_hi;
        const double d0 = anchor - last;
        const double d1 = anchor - curve.star->lambda_lo;
        if (d1 < d0 && d1 > 0.0) {
          std::vector<double> refine(cfg.refine_points);
          for (int j = 1; j <= cfg.refine_points; ++j)
            refine[j - 1] = anchor - d0 * std::pow(d1 / d0, static_cast<double>(j) / cfg.refine_points);
          refine.back() = curve.star->lambda_lo;
          const auto extra = evaluate_branch_points(pp, refine, cfg.shoot, cfg.policy);
          for (const auto& p : extra) {
            add_unique(curve.warnings, p.warnings);
            if (!p.ok()) {
              curve.warnings.push_back("refinement solve failed at lambda=" + fmt(p.lambda) +
                                       ": " + p.error);
            } else if (p.roots.roots.empty()) {
              curve.warnings.push_back("multiple-crossing: no scaling root at refinement lambda=" +
                                       fmt(p.lambda) + " below lambda*");
            } else {
              curve.samples.insert(curve.samples.end(), p.samples.begin(), p.samples.end());
            }
          }
        }
      }
    } catch (const BranchError& e) {
      curve.failure = e.what();
    } catch (const ShootingError& e) {
      curve.failure = e.what();
    }
  }

  std::stable_sort(curve.samples.begin(), curve.samples.end(), [](const auto& x, const auto& y) {
    if (x.family != y.family) return x.family < y.family;
    return x.lambda < y.lambda;
  });

  if (cfg.predict_endpoints) {
    try {
      const auto& np = pp.nonlinearity_params();
      EndpointNormData nd;
      nd.u_alpha = unit_pure_power_norms(np.alpha.value(), n, cfg.shoot);
      nd.u_beta = np.beta.value() == np.alpha.value()
                      ? *nd.u_alpha
                      : unit_pure_power_norms(np.beta.value(), n, cfg.shoot);
      if (curve.star) nd.star = std::make_pair(curve.star->profile.norms.l2sq, curve.star->profile.norms.gradsq);
      curve.endpoint_norms = nd;
      curve.endpoint_prediction = predicted_endpoint_masses(pp, nd);
    } catch (const std::exception& e) {
      curve.warnings.push_back(std::string("endpoint prediction unavailable: ") + e.what());
    }
  }
  return curve;
}

MassSolveResult solve_for_mass(const ProblemParams& pp, double c, const MassCurve& curve,
                               const BranchConfig& cfg, double rel_tol) {
  if (!(c > 0.0)) throw BranchError(BranchError::Kind::InvalidArgument, "target mass must be positive");

  struct Crossing {
    Family family;
    double lo, hi;
    double d_lo;  // mass - c at lo
    double amp_lo;
    bool exact;
  };
  std::vector<Crossing> crossings;
  for (Family f : curve.families()) {
    const auto s = curve.family(f);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double d = s[i].mass - c;
      if (d == 0.0) {
        crossings.push_back({f, s[i].lambda, s[i].lambda, d, s[i].amplitude, true});
      } else if (i + 1 < s.size() && d * (s[i + 1].mass - c) < 0.0) {
        crossings.push_back({f, s[i].lambda, s[i + 1].lambda, d, s[i].amplitude, false});
      }
    }
  }

  const int n = pp.n();
  std::vector<std::optional<NormalizedSolution>> found(crossings.size());
  std::vector<std::string> errors(crossings.size());

  auto build = [&](const RadialProfile& v, Family fam) -> std::optional<NormalizedSolution> {
    const ScalingRoots roots = scaling_roots(pp.a(), pp.b(), v.norms.gradsq, n);
    const auto t = root_for(roots, n, fam);
    if (!t) return std::nullopt;
    NormalizedSolution sol;
    sol.lambda = v.lambda;
    sol.family = fam;
    sol.t = *t;
    sol.profile = apply_scaling(v, *t, pp.a(), pp.b());
    sol.mass_achieved = sol.profile.norms.l2sq;
    sol.mass_error = std::abs(sol.mass_achieved - c) / c;
    sol.residual = kirchhoff_residual(sol.profile, v.lambda, pp.a(), pp.b(), pp.nonlinearity());
    sol.energy = energy_values(sol.profile.norms, v.lambda, pp.a(), pp.b()).i_functional;
    return sol;
  };

  run_indexed(crossings.size(), cfg.policy, [&](std::size_t idx) {
    const Crossing& cr = crossings[idx];
    try {
      if (cr.exact) {
        const RadialProfile v = solve_hinted(pp, cr.lo, cfg.shoot, cr.amp_lo);
        found[idx] = build(v, cr.family);
        if (!found[idx]) errors[idx] = "no scaling root for this family at the sampled lambda";
        return;
      }
      double lo = cr.lo, hi = cr.hi;
      double amp = cr.amp_lo, amp_at = cr.lo;
      for (int it = 1; it <= 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        const RadialProfile v = solve_hinted(pp, mid, cfg.shoot, predict_amplitude(pp, amp, amp_at, mid));
        auto sol = build(v, cr.family);
        if (!sol) {
          errors[idx] = "scaling root for the family vanished at lambda=" + fmt(mid);
          return;
        }
        sol->iterations = it;
        if (sol->mass_error < rel_tol) {
          found[idx] = std::move(sol);
          return;
        }
        amp = v.amplitude();
        amp_at = mid;
        if ((sol->mass_achieved - c > 0.0) == (cr.d_lo > 0.0)) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (hi / lo - 1.0 < 1e-15) break;
      }
      errors[idx] = "bisection stalled before reaching the mass tolerance";
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  });

  MassSolveResult out;
  for (std::size_t i = 0; i < crossings.size(); ++i) {
    if (found[i]) {
      out.solutions.push_back(std::move(*found[i]));
    } else {
      out.failures.push_back({crossings[i].family, crossings[i].lo, crossings[i].hi, errors[i]});
    }
  }
  std::stable_sort(out.solutions.begin(), out.solutions.end(), [](const auto& x, const auto& y) {
    if (x.lambda != y.lambda) return x.lambda < y.lambda;
    return x.family < y.family;
  });
  return out;
}

bool AsymptoticsReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

double loglog_slope(const std::vector<BranchSample>& samples, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& s : samples) {
    if (s.lambda < lo || s.lambda > hi) continue;
    const double x = std::log(s.lambda), y = std::log(s.mass);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

AsymptoticsReport verify_asymptotics(const MassCurve& curve, const AsymptoticPrediction& pred) {
  const int n = curve.n;
  if (curve.samples.empty())
    throw BranchError(BranchError::Kind::InsufficientRange, "curve has no samples");
  double lmin = kInf, lmax = 0.0;
  for (const auto& s : curve.samples) {
    lmin = std::min(lmin, s.lambda);
    lmax = std::max(lmax, s.lambda);
  }
  if (lmin > 1e-3 * (1.0 + 1e-12))
    throw BranchError(BranchError::Kind::InsufficientRange,
                      "curve does not reach lambda <= 1e-3 (smallest " + fmt(lmin) + ")");
  if (n <= 3 && lmax < 1e3 * (1.0 - 1e-12))
    throw BranchError(BranchError::Kind::InsufficientRange,
                      "curve does not reach lambda >= 1e3 (largest " + fmt(lmax) + ")");
  if (n >= 4 && !curve.star)
    throw BranchError(BranchError::Kind::InsufficientRange, "curve does not reach lambda*");

  AsymptoticsReport rep;

  auto median = [](std::vector<BranchSample> s) {
    std::vector<double> m;
    for (const auto& x : s) m.push_back(x.mass);
    std::sort(m.begin(), m.end());
    const std::size_t k = m.size();
    return k % 2 ? m[k / 2] : 0.5 * (m[k / 2 - 1] + m[k / 2]);
  };

  // at_low: compare the smallest-lambda end, else the largest-lambda end.
  auto endpoint = [&](const std::string& name, Family fam, double target, bool at_low, double tol) {
    const auto s = curve.family(fam);
    if (s.size() < 3)
      throw BranchError(BranchError::Kind::InsufficientRange,
                        "family " + std::string(to_string(fam)) + " has fewer than 3 samples");
    EndpointCheck c;
    c.name = name;
    c.family = fam;
    c.predicted = target;
    const BranchSample& e0 = at_low ? s[0] : s[s.size() - 1];
    const BranchSample& e1 = at_low ? s[1] : s[s.size() - 2];
    const BranchSample& e2 = at_low ? s[2] : s[s.size() - 3];
    c.lambda = e0.lambda;
    c.observed = e0.mass;
    if (std::isinf(target)) {
      c.kind = CheckKind::Divergence;
      c.tolerance = 10.0;
      c.deviation = e0.mass / median(s);
      c.passed = e0.mass > e1.mass && e1.mass > e2.mass && c.deviation > c.tolerance;
    } else if (target == 0.0) {
      c.kind = CheckKind::Vanishing;
      c.tolerance = 0.1;
      c.deviation = e0.mass / median(s);
      c.passed = e0.mass < e1.mass && e1.mass < e2.mass && c.deviation < c.tolerance;
    } else {
      c.kind = CheckKind::Finite;
      c.tolerance = tol;
      c.deviation = std::abs(e0.mass - target) / std::abs(target);
      c.passed = c.deviation < tol;
    }
    rep.checks.push_back(c);
  };

  if (n <= 4) {
    endpoint("lambda->0", Family::Only, pred.mass_at_zero, true, 0.02);
    if (n <= 3) {
      if (pred.mass_at_upper_end)
        endpoint("lambda->inf", Family::Only, *pred.mass_at_upper_end, false, 0.05);
    } else {
      endpoint("lambda->lambda*", Family::Only, pred.mass_at_upper_end.value_or(kInf), false, 0.02);
    }
    return rep;
  }

  endpoint("lambda->0", Family::Upper, pred.mass_at_zero, true, 0.02);
  endpoint("lambda->0", Family::Lower, pred.lower_mass_at_zero.value_or(kInf), true, 0.02);
  if (pred.mass_at_upper_end) {
    endpoint("lambda->lambda*", Family::Lower, *pred.mass_at_upper_end, false, 0.02);
    endpoint("lambda->lambda*", Family::Upper, *pred.mass_at_upper_end, false, 0.02);
  }
  const auto lower = curve.family(Family::Lower);
  const auto upper = curve.family(Family::Upper);
  if (!lower.empty() && !upper.empty()) {
    EndpointCheck c;
    c.name = "families at lambda*";
    c.family = Family::Lower;
    c.kind = CheckKind::Agreement;
    c.lambda = lower.back().lambda;
    c.observed = lower.back().mass;
    c.predicted = upper.back().mass;
    c.deviation = std::abs(c.observed - c.predicted) / c.predicted;
    c.tolerance = 0.01;
    c.passed = c.deviation < c.tolerance;
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace kirchhoff
