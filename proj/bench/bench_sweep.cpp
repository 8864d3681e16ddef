// Times evaluate_branch_points with the serial and OpenMP policies on the
// same lambda grid and checks that both produce identical samples.
//
//   bench_sweep [n] [alpha] [points]

#include "kirchhoff/branch.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace kirchhoff;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same(const std::vector<BranchPoint>& x, const std::vector<BranchPoint>& y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].samples.size() != y[i].samples.size() || x[i].error != y[i].error) return false;
    for (std::size_t k = 0; k < x[i].samples.size(); ++k) {
      const auto& a = x[i].samples[k];
      const auto& b = y[i].samples[k];
      if (a.mass != b.mass || a.t != b.t || a.residual != b.residual) return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 3;
  const std::string alpha = argc > 2 ? argv[2] : "10/3";
  const int points = argc > 3 ? std::atoi(argv[3]) : 48;

  const ProblemParams pp(1.0, 1.0, n, NonlinearityParams::pure(Exponent::parse(alpha)));
  const auto grid = log_grid(1e-3, 1e3, points);
  const ShootConfig cfg;

  auto t0 = std::chrono::steady_clock::now();
  const auto serial = evaluate_branch_points(pp, grid, cfg, ExecutionPolicy::Serial);
  const double ts = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto parallel = evaluate_branch_points(pp, grid, cfg, ExecutionPolicy::Parallel);
  const double tp = seconds_since(t0);

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("n=%d alpha=%s points=%d threads=%d\n", n, alpha.c_str(), points, threads);
  std::printf("serial   %.3f s\n", ts);
  std::printf("parallel %.3f s  speedup %.2fx\n", tp, ts / tp);
  const bool ok = same(serial, parallel);
  std::printf("results identical: %s\n", ok ? "yes" : "NO");
  return ok ? 0 : 1;
}
