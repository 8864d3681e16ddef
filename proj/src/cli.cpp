#include "kirchhoff/cli.hpp"

#include "kirchhoff/branch.hpp"
#include "kirchhoff/groundstate.hpp"
#include "kirchhoff/io.hpp"
#include "kirchhoff/model.hpp"
#include "kirchhoff/scaling.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>

namespace kirchhoff::cli {

namespace {

using io::Json;

struct Options {
  std::string command;
  int n = 0;
  std::string alpha;
  std::optional<std::string> beta;
  double a = 1.0;
  double b = 1.0;
  double mu1 = 1.0;
  std::optional<double> mu2;
  std::optional<std::string> family;
  std::optional<double> lambda;
  double lambda_min = 1e-4;
  double lambda_max = 1e4;
  int points = 64;
  std::optional<double> c;
  std::optional<std::string> out;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

NonlinearityFamily infer_family(const Exponent& alpha, const Exponent& beta) {
  int cmp;
  if (beta.is_exact()) {
    cmp = alpha.compare(beta.num(), beta.den());
  } else {
    cmp = alpha.value() < beta.value() ? -1 : (alpha.value() > beta.value() ? 1 : 0);
  }
  if (cmp == 0) return NonlinearityFamily::PurePower;
  return cmp < 0 ? NonlinearityFamily::DoublePower : NonlinearityFamily::RationalBlend;
}

ProblemParams build_problem(const Options& o) {
  const Exponent alpha = Exponent::parse(o.alpha);
  const Exponent beta = o.beta ? Exponent::parse(*o.beta) : alpha;
  const NonlinearityFamily fam = o.family ? parse_family(*o.family) : infer_family(alpha, beta);
  NonlinearityParams np{alpha, beta, o.mu1, o.mu2.value_or(o.mu1), fam};
  if (fam != NonlinearityFamily::PurePower && !o.mu2) np.mu2 = 1.0;
  return ProblemParams(o.a, o.b, o.n, np);
}

void validate(const Options& o) {
  if (o.command == "groundstate" && !(o.lambda && *o.lambda > 0.0))
    throw UsageError("--lambda must be positive");
  if (o.command == "masscurve" || o.command == "solve-mass" || o.command == "verify") {
    if (!(o.lambda_min > 0.0) || !(o.lambda_max > o.lambda_min))
      throw UsageError("need 0 < --lambda-min < --lambda-max");
    if (o.points < 16) throw UsageError("--points must be at least 16");
  }
  if (o.command == "solve-mass" && !(o.c && *o.c > 0.0)) throw UsageError("--c must be positive");
  if (o.command == "verify") {
    if (o.lambda_min > 1e-3) throw UsageError("verify needs --lambda-min <= 1e-3");
    if (o.n <= 3 && o.lambda_max < 1e3) throw UsageError("verify needs --lambda-max >= 1e3 for n <= 3");
  }
}

Json config_json(const Options& o, const ProblemParams& pp, const ShootConfig& sc) {
  const auto& np = pp.nonlinearity_params();
  Json j;
  j["command"] = o.command;
  j["n"] = pp.n();
  j["a"] = pp.a();
  j["b"] = pp.b();
  j["alpha"] = np.alpha.to_string();
  j["beta"] = np.beta.to_string();
  j["mu1"] = np.mu1;
  j["mu2"] = np.mu2;
  j["family"] = to_string(np.family);
  if (o.command == "groundstate") j["lambda"] = *o.lambda;
  if (o.command == "masscurve" || o.command == "solve-mass" || o.command == "verify") {
    j["lambda_min"] = o.lambda_min;
    j["lambda_max"] = o.lambda_max;
    j["points"] = o.points;
  }
  if (o.command == "solve-mass") j["c"] = *o.c;
  j["out"] = o.out ? Json(*o.out) : Json(nullptr);
  j["shoot"] = {{"r_max", sc.r_max},
                {"abs_tol", sc.abs_tol},
                {"rel_tol", sc.rel_tol},
                {"amp_lo_factor", sc.amp_lo_factor},
                {"amp_hi_factor", sc.amp_hi_factor},
                {"max_bisections", sc.max_bisections},
                {"grid_resolution", sc.grid_resolution}};
  return j;
}

io::Metadata metadata(const Json& config) {
  io::Metadata m;
  for (auto it = config.begin(); it != config.end(); ++it) {
    if (it->is_object()) {
      for (auto jt = it->begin(); jt != it->end(); ++jt)
        m.emplace_back(it.key() + "." + jt.key(), jt->is_string() ? jt->get<std::string>() : jt->dump());
    } else {
      m.emplace_back(it.key(), it->is_string() ? it->get<std::string>() : it->dump());
    }
  }
  return m;
}

EndpointNormData pure_norms(const ProblemParams& pp, const ShootConfig& sc, Json& warnings) {
  EndpointNormData nd;
  try {
    const auto& np = pp.nonlinearity_params();
    nd.u_alpha = unit_pure_power_norms(np.alpha.value(), pp.n(), sc);
    nd.u_beta = np.beta.value() == np.alpha.value() ? *nd.u_alpha
                                                    : unit_pure_power_norms(np.beta.value(), pp.n(), sc);
  } catch (const std::exception& e) {
    warnings.push_back(std::string("pure-power norms unavailable: ") + e.what());
  }
  return nd;
}

struct Report {
  Json config;
  Json regime = nullptr;
  Json curve_summary = nullptr;
  Json endpoint_checks = Json::array();
  Json warnings = Json::array();
  Json solutions = Json::array();

  Json doc() const {
    return {{"config", config},           {"regime", regime},
            {"curve_summary", curve_summary}, {"endpoint_checks", endpoint_checks},
            {"warnings", warnings},       {"solutions", solutions}};
  }
};

void add_warnings(Json& dst, const std::vector<std::string>& src) {
  for (const auto& w : src) dst.push_back(w);
}

int finish(const Options& o, const Report& rep, int code, std::ostream& out) {
  if (o.out) {
    const std::string path = io::sidecar_path(*o.out);
    io::write_json(path, rep.doc());
    out << "wrote " << path << '\n';
  } else if (o.command == "classify") {
    out << rep.doc().dump(2) << '\n';
  }
  return code;
}

MassCurve trace(const Options& o, const ProblemParams& pp, const BranchConfig& bc, Report& rep) {
  MassCurve curve = trace_branch(pp, o.lambda_min, o.lambda_max, o.points, bc);
  rep.curve_summary = io::curve_summary(curve);
  add_warnings(rep.warnings, curve.warnings);
  rep.regime = io::to_json(classify_regime(pp, &curve.endpoint_norms));
  return curve;
}

std::string curve_csv_path(const std::string& out) {
  const std::string side = io::sidecar_path(out);
  if (side == out) return out.substr(0, out.size() - 5) + ".csv";
  return out;
}

int run_classify(const Options& o, const ProblemParams& pp, Report& rep, const ShootConfig& sc,
                 std::ostream& out) {
  const EndpointNormData nd = pure_norms(pp, sc, rep.warnings);
  const RegimeReport r = classify_regime(pp, &nd);
  rep.regime = io::to_json(r);
  add_warnings(rep.warnings, r.notes);
  if (o.out) out << r.cell << ' ' << r.case_label << ' ' << to_string(r.prediction.kind) << '\n';
  return finish(o, rep, kOk, out);
}

int run_groundstate(const Options& o, const ProblemParams& pp, Report& rep, const ShootConfig& sc,
                    std::ostream& out) {
  const EndpointNormData nd = pure_norms(pp, sc, rep.warnings);
  rep.regime = io::to_json(classify_regime(pp, &nd));
  RadialProfile v;
  try {
    v = solve_ground_state(pp, *o.lambda, sc);
  } catch (const ShootingError& e) {
    rep.curve_summary = {{"failure", e.what()}};
    finish(o, rep, kSolver, out);
    throw;
  }
  add_warnings(rep.warnings, v.warnings);
  const ScalingRoots roots = scaling_roots(pp.a(), pp.b(), v.norms.gradsq, pp.n());
  if (roots.roots.empty()) rep.warnings.push_back("no positive root of the fibering map at this lambda");
  for (const auto& s : samples_from_profile(pp, v, roots)) {
    Json js = io::to_json(s);
    js["ground_state"] = {{"amplitude", io::number(v.amplitude())},
                          {"l2sq", io::number(v.norms.l2sq)},
                          {"gradsq", io::number(v.norms.gradsq)},
                          {"gint", io::number(v.norms.gint)},
                          {"ode_residual", io::number(v.diagnostics.ode_residual_sup)},
                          {"pohozaev_residual", io::number(v.diagnostics.pohozaev_rel_residual)},
                          {"nodes", v.size()}};
    rep.solutions.push_back(js);
  }
  rep.curve_summary = {{"lambda", io::number(v.lambda)},
                       {"amplitude", io::number(v.amplitude())},
                       {"l2sq", io::number(v.norms.l2sq)},
                       {"gradsq", io::number(v.norms.gradsq)},
                       {"gint", io::number(v.norms.gint)},
                       {"ode_residual", io::number(v.diagnostics.ode_residual_sup)},
                       {"pohozaev_residual", io::number(v.diagnostics.pohozaev_rel_residual)},
                       {"roots", roots.roots},
                       {"t_star", io::number(roots.t_star)},
                       {"f_min", io::number(roots.f_min)},
                       {"failure", nullptr}};
  if (o.out) {
    io::Metadata meta = metadata(rep.config);
    meta.emplace_back("l2sq", io::format_double(v.norms.l2sq));
    meta.emplace_back("gradsq", io::format_double(v.norms.gradsq));
    meta.emplace_back("gint", io::format_double(v.norms.gint));
    meta.emplace_back("ode_residual", io::format_double(v.diagnostics.ode_residual_sup));
    meta.emplace_back("pohozaev_residual", io::format_double(v.diagnostics.pohozaev_rel_residual));
    io::write_profile_csv(curve_csv_path(*o.out), v, meta);
  }
  out << "v(0)=" << io::format_double(v.amplitude()) << " |v|^2=" << io::format_double(v.norms.l2sq)
      << " |grad v|^2=" << io::format_double(v.norms.gradsq) << '\n';
  return finish(o, rep, kOk, out);
}

int run_masscurve(const Options& o, const ProblemParams& pp, Report& rep, const BranchConfig& bc,
                  std::ostream& out) {
  const MassCurve curve = trace(o, pp, bc, rep);
  if (curve.endpoint_prediction) {
    try {
      for (const auto& c : verify_asymptotics(curve, *curve.endpoint_prediction).checks)
        rep.endpoint_checks.push_back(io::to_json(c));
    } catch (const BranchError& e) {
      rep.warnings.push_back(std::string("endpoint checks skipped: ") + e.what());
    }
  }
  if (o.out) {
    io::Metadata meta = metadata(rep.config);
    if (curve.star) meta.emplace_back("lambda_star", io::format_double(curve.star->lambda));
    io::write_curve_csv(curve_csv_path(*o.out), curve.samples, meta);
  }
  out << curve.samples.size() << " samples";
  if (curve.star) out << ", lambda*=" << io::format_double(curve.star->lambda);
  out << '\n';
  return finish(o, rep, curve.failure ? kSolver : kOk, out);
}

int run_solve_mass(const Options& o, const ProblemParams& pp, Report& rep, const BranchConfig& bc,
                   std::ostream& out) {
  const MassCurve curve = trace(o, pp, bc, rep);
  const MassSolveResult res = solve_for_mass(pp, *o.c, curve, bc);
  std::vector<BranchSample> rows;
  for (const auto& s : res.solutions) {
    rep.solutions.push_back(io::to_json(s));
    BranchSample b;
    b.lambda = s.lambda;
    b.family = s.family;
    b.t = s.t;
    b.mass = s.mass_achieved;
    b.gradsq = s.profile.norms.gradsq;
    b.energy = s.energy;
    b.residual = s.residual;
    rows.push_back(b);
  }
  for (const auto& f : res.failures)
    rep.warnings.push_back("crossing in family " + std::string(to_string(f.family)) + " between lambda=" +
                           io::format_double(f.lambda_lo) + " and " + io::format_double(f.lambda_hi) +
                           " not refined: " + f.message);
  if (o.out) {
    io::Metadata meta = metadata(rep.config);
    io::write_curve_csv(curve_csv_path(*o.out), rows, meta);
  }
  out << res.solutions.size() << " solution(s) with mass " << io::format_double(*o.c) << '\n';
  const bool failed = curve.failure.has_value() || !res.failures.empty();
  return finish(o, rep, failed ? kSolver : kOk, out);
}

int run_verify(const Options& o, const ProblemParams& pp, Report& rep, const BranchConfig& bc,
               std::ostream& out) {
  const MassCurve curve = trace(o, pp, bc, rep);
  if (curve.failure || !curve.endpoint_prediction) {
    if (!curve.endpoint_prediction) rep.warnings.push_back("no endpoint prediction available");
    return finish(o, rep, kSolver, out);
  }
  AsymptoticsReport ar;
  try {
    ar = verify_asymptotics(curve, *curve.endpoint_prediction);
  } catch (const BranchError& e) {
    rep.warnings.push_back(std::string("endpoint checks failed to run: ") + e.what());
    return finish(o, rep, kSolver, out);
  }
  for (const auto& c : ar.checks) {
    rep.endpoint_checks.push_back(io::to_json(c));
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " [" << to_string(c.family) << "] "
        << to_string(c.kind) << " observed=" << io::format_double(c.observed)
        << " predicted=" << io::format_double(c.predicted) << '\n';
  }
  return finish(o, rep, ar.all_passed() ? kOk : kCheckFailed, out);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kirchhoff normalized solutions", "kirchhoff"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", o.n, "space dimension")->required()->check(CLI::PositiveNumber);
    sub->add_option("--alpha", o.alpha, "exponent at 0, decimal or p/q")->required();
    sub->add_option("--beta", o.beta, "exponent at infinity (default alpha)");
    sub->add_option("--a", o.a, "Kirchhoff constant a");
    sub->add_option("--b", o.b, "Kirchhoff constant b");
    sub->add_option("--mu1", o.mu1, "weight at 0");
    sub->add_option("--mu2", o.mu2, "weight at infinity");
    sub->add_option("--family", o.family, "double | rational | pure");
    sub->add_option("--out", o.out, "output path");
  };
  auto add_range = [&](CLI::App* sub) {
    sub->add_option("--lambda-min", o.lambda_min, "smallest lambda");
    sub->add_option("--lambda-max", o.lambda_max, "largest lambda");
    sub->add_option("--points", o.points, "log-grid points");
  };

  auto* gs = app.add_subcommand("groundstate", "ground state and Kirchhoff solutions at one lambda");
  add_common(gs);
  gs->add_option("--lambda", o.lambda, "frequency")->required();
  auto* mc = app.add_subcommand("masscurve", "trace the mass curve");
  add_common(mc);
  add_range(mc);
  auto* cl = app.add_subcommand("classify", "regime cell and prediction");
  add_common(cl);
  auto* sm = app.add_subcommand("solve-mass", "all solutions with |u|_2^2 = c on the traced curve");
  add_common(sm);
  add_range(sm);
  sm->add_option("--c", o.c, "target mass")->required();
  auto* vf = app.add_subcommand("verify", "check the curve endpoints against the predicted limits");
  add_common(vf);
  add_range(vf);

  std::vector<std::string> argv_store{"kirchhoff"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kUsage;
  }
  o.command = app.get_subcommands().front()->get_name();

  std::optional<ProblemParams> pp;
  try {
    validate(o);
    pp.emplace(build_problem(o));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  const BranchConfig bc;
  Report rep;
  rep.config = config_json(o, *pp, bc.shoot);
  try {
    if (o.command == "classify") return run_classify(o, *pp, rep, bc.shoot, out);
    if (o.command == "groundstate") return run_groundstate(o, *pp, rep, bc.shoot, out);
    if (o.command == "masscurve") return run_masscurve(o, *pp, rep, bc, out);
    if (o.command == "solve-mass") return run_solve_mass(o, *pp, rep, bc, out);
    return run_verify(o, *pp, rep, bc, out);
  } catch (const ShootingError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const BranchError& e) {
    err << "solver failure: " << e.what() << '\n';
    rep.warnings.push_back(e.what());
    try {
      finish(o, rep, kSolver, out);
    } catch (const std::exception&) {
    }
    return kSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolver;
  }
}

}  // namespace kirchhoff::cli
