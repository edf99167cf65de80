#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "ctbg/grid.hpp"
#include "ctbg/potential.hpp"
#include "ctbg/spectra.hpp"
#include "ctbg/theta.hpp"

// Compares the OpenMP parallel_for against its serial reference on two
// representative kernels and verifies that both produce identical results.

namespace {

using clock_type = std::chrono::steady_clock;

double run_ms(const std::function<void()>& fn) {
  const auto t0 = clock_type::now();
  fn();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main() {
  setenv("OPENBLAS_NUM_THREADS", "1", 0);
  using namespace ctbg;

  std::printf("threads available: %d\n", max_threads());

  {
    // Theta-series synthesis over many cell points per task.
    const ThetaEvaluator th;
    const int tasks = 64, m = 96;
    std::vector<double> serial(tasks), parallel(tasks);
    const auto kernel = [&](std::vector<double>& out, bool serial_mode) {
      parallel_for(
          tasks,
          [&](int t) {
            double acc = 0.0;
            const cplx shift{0.013 * t, 0.007 * t};
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < m; ++j) {
                const cplx z = cplx(double(i) + 0.5, 0.0) / double(m) +
                               (double(j) + 0.5) / double(m) * omega + shift;
                acc += std::abs(th.theta(z));
              }
            out[std::size_t(t)] = acc;
          },
          serial_mode);
    };
    const double ms_serial = run_ms([&] { kernel(serial, true); });
    const double ms_parallel = run_ms([&] { kernel(parallel, false); });
    double diff = 0.0;
    for (int t = 0; t < tasks; ++t)
      diff = std::max(diff, std::abs(serial[std::size_t(t)] -
                                     parallel[std::size_t(t)]));
    std::printf("theta grid      serial %8.1f ms   parallel %8.1f ms   "
                "speedup %.2fx   max diff %.3e\n",
                ms_serial, ms_parallel, ms_serial / ms_parallel, diff);
  }

  {
    // Singular value kernel per momentum.
    const PotentialPair pot = build_bm();
    const std::vector<cplx> ks = cross_section(24);
    std::vector<double> serial(ks.size()), parallel(ks.size());
    const auto kernel = [&](std::vector<double>& out, bool serial_mode) {
      parallel_for(
          int(ks.size()),
          [&](int i) {
            out[std::size_t(i)] =
                bands(cplx{0.4, 0.0}, pot, ks[std::size_t(i)], 2, 6)[0];
          },
          serial_mode);
    };
    const double ms_serial = run_ms([&] { kernel(serial, true); });
    const double ms_parallel = run_ms([&] { kernel(parallel, false); });
    double diff = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i)
      diff = std::max(diff, std::abs(serial[i] - parallel[i]));
    std::printf("band section    serial %8.1f ms   parallel %8.1f ms   "
                "speedup %.2fx   max diff %.3e\n",
                ms_serial, ms_parallel, ms_serial / ms_parallel, diff);
  }

  return 0;
}
