// Compares the serial reference trial loop against the OpenMP path on a few
// grid points and reports throughput; both paths must agree bit-for-bit.

#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "w2s/risk.hpp"
#include "w2s/sweep.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  long trials = 160;
  if (argc > 1) trials = std::atol(argv[1]);

  auto cfg = w2s::sweep::desk_preset();
  const auto model = w2s::build_synthetic(cfg.base, 7);

  struct Point {
    w2s::Index n, N;
  };
  const Point points[] = {{46, 200}, {90, 400}, {220, 400}};

#ifdef _OPENMP
  std::printf("threads available: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both paths run serially\n");
#endif
  std::printf("%8s %8s %10s %12s %12s %9s %8s\n", "n", "N", "trials", "serial_s", "openmp_s", "speedup",
              "match");

  for (const Point& pt : points) {
    w2s::PipelineConfig pc{model.task, model.cov_s, model.cov_w, pt.n, pt.N, cfg.solver, cfg.base.latent};

    auto t0 = clock_type::now();
    const auto serial = w2s::estimate_all_risks(pc, trials, 11, w2s::Exec::serial);
    const double ts = seconds_since(t0);

    t0 = clock_type::now();
    const auto parallel = w2s::estimate_all_risks(pc, trials, 11, w2s::Exec::openmp);
    const double tp = seconds_since(t0);

    bool match = true;
    for (auto m : w2s::kAllModels)
      match = match && std::memcmp(&serial[m], &parallel[m], sizeof(w2s::RiskEstimate)) == 0;

    std::printf("%8lld %8lld %10ld %12.3f %12.3f %8.2fx %8s\n", static_cast<long long>(pt.n),
                static_cast<long long>(pt.N), trials, ts, tp, ts / tp, match ? "yes" : "NO");
    if (!match) return 1;
  }
  return 0;
}
