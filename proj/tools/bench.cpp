// Compares the serial reference kernels against the OpenMP paths: wall time
// and result equality for the three data-parallel workloads (parameter
// sweeps, spectra, Monte-Carlo trace extraction).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "sqz/calibration.hpp"
#include "sqz/chain.hpp"
#include "sqz/config.hpp"
#include "sqz/spectral.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

template <typename F>
double best_ms(F&& body, int reps) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

bool same(const std::vector<sqz::SqueezingResult>& a,
          const std::vector<sqz::SqueezingResult>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].s_minus_db != b[i].s_minus_db || a[i].s_plus_db != b[i].s_plus_db ||
        a[i].n_minus != b[i].n_minus || a[i].n_plus != b[i].n_plus ||
        a[i].n_vac != b[i].n_vac) {
      return false;
    }
  }
  return true;
}

void report(const char* name, double serial_ms, double parallel_ms, bool match) {
  std::printf("%-24s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   match %s\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              match ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP: %d thread(s)\n", omp_get_max_threads());
#else
  std::printf("OpenMP: compiled out (parallel policy falls back to serial)\n");
#endif

  {
    std::vector<sqz::ChainParams> points(100000);
    for (std::size_t i = 0; i < points.size(); ++i) {
      points[i].r1 = 0.2 + 1.2 * static_cast<double>(i) / points.size();
      points[i].sigma_phase = 0.02;
    }
    std::vector<sqz::SqueezingResult> rs, rp;
    const double ts = best_ms([&] { rs = sqz::simulate_many_serial(points); }, 3);
    const double tp = best_ms([&] { rp = sqz::simulate_many(points, sqz::Exec::parallel); }, 3);
    report("chain sweep (100k)", ts, tp, same(rs, rp));
  }

  {
    sqz::RunConfig config = sqz::RunConfig::defaults();
    config.spectral.bins = 16001;
    const sqz::SpectralGrid grid = config.spectral.grid();
    const sqz::SpectralModelParams params = config.spectral.model_params();
    std::vector<sqz::SqueezingResult> rs, rp;
    const double ts = best_ms([&] { rs = sqz::squeezing_spectrum_serial(params, grid); }, 3);
    const double tp =
        best_ms([&] { rp = sqz::squeezing_spectrum(params, grid, sqz::Exec::parallel); }, 3);
    report("spectrum (16001 bins)", ts, tp, same(rs, rp));
  }

  {
    const sqz::ChainParams p;
    std::vector<double> ramp(1024);
    for (std::size_t i = 0; i < ramp.size(); ++i) {
      ramp[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / (ramp.size() - 1);
    }
    std::vector<sqz::SqueezingResult> rs, rp;
    const double ts = best_ms(
        [&] { rs = sqz::extraction_spread(p, ramp, 0.01, 7, 32, sqz::Exec::serial); }, 3);
    const double tp = best_ms(
        [&] { rp = sqz::extraction_spread(p, ramp, 0.01, 7, 32, sqz::Exec::parallel); }, 3);
    report("trace Monte-Carlo (32)", ts, tp, same(rs, rp));
  }

  return 0;
}
