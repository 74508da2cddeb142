// Benchmark the batch state-sweep kernels: serial reference vs OpenMP.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ipdyn/sweep.hpp"

using namespace ipdyn;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int count = argc > 1 ? std::atoi(argv[1]) : 2000;
  const ModelGraph model = builtin_manipulator3dof();
  const auto states = sweep::sample_states(model, count, 7, 1.0);

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif
  std::printf("states:  %d\n\n", count);
  std::printf("%-22s %12s %12s %9s\n", "kernel", "serial [ms]", "parallel [ms]", "speedup");

  {
    std::vector<double> serial, parallel;
    const double ts = time_best_of(3, [&] { serial = sweep::run_inertia_spectrum_serial(model, states); });
    const double tp = time_best_of(3, [&] { parallel = sweep::run_inertia_spectrum(model, states); });
    const bool same = serial == parallel;
    std::printf("%-22s %12.2f %12.2f %8.2fx%s\n", "inertia-spectrum", ts, tp, ts / tp,
                same ? "" : "  MISMATCH");
  }
  {
    std::vector<sweep::StateChecks> serial, parallel;
    const double ts = time_best_of(3, [&] { serial = sweep::run_checks_serial(model, states); });
    const double tp = time_best_of(3, [&] { parallel = sweep::run_checks(model, states); });
    bool same = serial.size() == parallel.size();
    for (size_t i = 0; same && i < serial.size(); ++i) {
      same = serial[i].inertia_min_eig == parallel[i].inertia_min_eig &&
             serial[i].twist_defect == parallel[i].twist_defect;
    }
    std::printf("%-22s %12.2f %12.2f %8.2fx%s\n", "full-checks", ts, tp, ts / tp,
                same ? "" : "  MISMATCH");
  }
  return 0;
}
