#include "kirchhoff/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace kirchhoff::io {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

void write_meta(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return nullptr;
  return x;
}

Json number(const std::optional<double>& x) { return x ? number(*x) : Json(nullptr); }

void write_profile_csv(const std::string& path, const RadialProfile& p, const Metadata& meta) {
  auto out = open_out(path);
  write_meta(out, meta);
  out << "r,v,dv\n";
  for (std::size_t i = 0; i < p.size(); ++i)
    out << format_double(p.grid[i]) << ',' << format_double(p.values[i]) << ','
        << format_double(p.derivs[i]) << '\n';
}

void write_curve_csv(const std::string& path, const std::vector<BranchSample>& samples,
                     const Metadata& meta) {
  auto out = open_out(path);
  write_meta(out, meta);
  out << "lambda,family,t,mass,gradsq,energy,residual\n";
  for (const auto& s : samples)
    out << format_double(s.lambda) << ',' << to_string(s.family) << ',' << format_double(s.t)
        << ',' << format_double(s.mass) << ',' << format_double(s.gradsq) << ','
        << format_double(s.energy) << ',' << format_double(s.residual) << '\n';
}

void write_json(const std::string& path, const Json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

std::string sidecar_path(const std::string& out) {
  if (ends_with(out, ".csv")) return out.substr(0, out.size() - 4) + ".json";
  if (ends_with(out, ".json")) return out;
  return out + ".json";
}

Json to_json(const RegimeReport& r) {
  Json th = Json::array();
  for (const auto& t : r.thresholds)
    th.push_back({{"name", t.name}, {"formula", t.formula}, {"value", number(t.value)}});
  return {{"n", r.n},
          {"i_class", to_string(r.i_class)},
          {"j_class", to_string(r.j_class)},
          {"cell", r.cell},
          {"case_label", r.case_label},
          {"prediction",
           {{"kind", to_string(r.prediction.kind)},
            {"nonexistence", to_string(r.prediction.nonexistence)},
            {"statement", r.prediction.statement}}},
          {"thresholds", th},
          {"notes", r.notes}};
}

Json to_json(const AsymptoticPrediction& p) {
  return {{"mass_at_zero", number(p.mass_at_zero)},
          {"lower_mass_at_zero", number(p.lower_mass_at_zero)},
          {"mass_at_upper_end", number(p.mass_at_upper_end)},
          {"upper_end_kind", p.upper_end_kind == UpperEndKind::LambdaInfinity ? "lambda-infinity" : "s-star"},
          {"sigma", number(p.sigma)},
          {"eta", number(p.eta)}};
}

Json to_json(const BranchSample& s) {
  return {{"lambda", number(s.lambda)}, {"family", to_string(s.family)},
          {"t", number(s.t)},           {"mass", number(s.mass)},
          {"gradsq", number(s.gradsq)}, {"energy", number(s.energy)},
          {"residual", number(s.residual)}};
}

Json to_json(const EndpointCheck& c) {
  return {{"name", c.name},
          {"family", to_string(c.family)},
          {"kind", to_string(c.kind)},
          {"lambda", number(c.lambda)},
          {"observed", number(c.observed)},
          {"predicted", number(c.predicted)},
          {"deviation", number(c.deviation)},
          {"tolerance", number(c.tolerance)},
          {"passed", c.passed}};
}

Json to_json(const NormalizedSolution& s) {
  return {{"lambda", number(s.lambda)},
          {"family", to_string(s.family)},
          {"t", number(s.t)},
          {"mass", number(s.mass_achieved)},
          {"mass_error", number(s.mass_error)},
          {"gradsq", number(s.profile.norms.gradsq)},
          {"energy", number(s.energy)},
          {"residual", number(s.residual)},
          {"amplitude", number(s.profile.amplitude())},
          {"iterations", s.iterations}};
}

Json curve_summary(const MassCurve& curve) {
  Json fams = Json::object();
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Family f : curve.families()) {
    const auto s = curve.family(f);
    const BranchSample* mn = &s.front();
    const BranchSample* mx = &s.front();
    double max_res = 0.0;
    for (const auto& x : s) {
      if (x.mass < mn->mass) mn = &x;
      if (x.mass > mx->mass) mx = &x;
      max_res = std::max(max_res, x.residual);
    }
    lo = std::min(lo, mn->mass);
    hi = std::max(hi, mx->mass);
    fams[std::string(to_string(f))] = {{"samples", s.size()},
                                       {"lambda_first", number(s.front().lambda)},
                                       {"lambda_last", number(s.back().lambda)},
                                       {"mass_first", number(s.front().mass)},
                                       {"mass_last", number(s.back().mass)},
                                       {"mass_min", number(mn->mass)},
                                       {"lambda_at_mass_min", number(mn->lambda)},
                                       {"mass_max", number(mx->mass)},
                                       {"lambda_at_mass_max", number(mx->lambda)},
                                       {"max_residual", number(max_res)}};
  }
  Json star = nullptr;
  if (curve.star) {
    star = {{"lambda", number(curve.star->lambda)},
            {"bracket", {number(curve.star->lambda_lo), number(curve.star->lambda_hi)}},
            {"gamma", number(curve.star->gamma)},
            {"gamma_star", number(curve.star->gamma_star)},
            {"v_l2sq", number(curve.star->profile.norms.l2sq)},
            {"v_gradsq", number(curve.star->profile.norms.gradsq)}};
  }
  Json thresholds = nullptr;
  if (!curve.samples.empty()) {
    thresholds = {{"curve_min_mass", number(lo)},
                  {"curve_max_mass", number(hi)},
                  {"note", "empirical: extrema of the sampled curve, not certified bounds"}};
  }
  return {{"n", curve.n},
          {"lambda_min", number(curve.lambda_min)},
          {"lambda_max", number(curve.lambda_max)},
          {"points", curve.points},
          {"families", fams},
          {"lambda_star", star},
          {"empirical_thresholds", thresholds},
          {"endpoint_prediction",
           curve.endpoint_prediction ? to_json(*curve.endpoint_prediction) : Json(nullptr)},
          {"failure", curve.failure ? Json(*curve.failure) : Json(nullptr)}};
}

}  // namespace kirchhoff::io
