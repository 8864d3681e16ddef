// CSV and JSON serialization. Numbers are written with 17 significant
// digits; infinities as the string "inf".

#pragma once

#include "kirchhoff/branch.hpp"
#include "kirchhoff/model.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace kirchhoff::io {

using Json = nlohmann::ordered_json;
using Metadata = std::vector<std::pair<std::string, std::string>>;

std::string format_double(double x);

/// A JSON number, or "inf"/"-inf"/null for non-finite values.
Json number(double x);
Json number(const std::optional<double>& x);

/// `# key=value` lines followed by `r,v,dv` rows.
void write_profile_csv(const std::string& path, const RadialProfile& profile, const Metadata& meta);

/// `# key=value` lines followed by `lambda,family,t,mass,gradsq,energy,residual`.
void write_curve_csv(const std::string& path, const std::vector<BranchSample>& samples,
                     const Metadata& meta);

void write_json(const std::string& path, const Json& doc);

/// foo.csv -> foo.json, foo.json -> foo.json, anything else gets ".json".
std::string sidecar_path(const std::string& out);

Json to_json(const RegimeReport& report);
Json to_json(const AsymptoticPrediction& pred);
Json to_json(const BranchSample& s);
Json to_json(const EndpointCheck& c);
Json to_json(const NormalizedSolution& s);
/// Per-family ranges, lambda*, failure and the empirical curve extrema.
Json curve_summary(const MassCurve& curve);

}  // namespace kirchhoff::io
