// Command-line front end.
//
//   kirchhoff groundstate --n N --alpha A --lambda L [--out profile.csv]
//   kirchhoff masscurve   --n N --alpha A [--lambda-min --lambda-max --points] [--out curve.csv]
//   kirchhoff classify    --n N --alpha A [--beta B] [--out report.json]
//   kirchhoff solve-mass  --n N --alpha A --c C [--out solutions.csv]
//   kirchhoff verify      --n N --alpha A [--out verify.json]
//
// Common flags: --beta (default alpha), --a, --b, --mu1, --mu2 (default 1),
// --family double|rational|pure (inferred from alpha vs beta when absent).

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kirchhoff::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,  // verify: some endpoint check failed
  kUsage = 2,        // parse or validation error
  kSolver = 3,       // solver failure; the JSON report is still written
};

/// `args` starts with the subcommand (no program name).
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kirchhoff::cli
