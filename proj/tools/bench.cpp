// Timing comparison of the serial reference paths against the OpenMP paths,
// and of the two run-length samplers.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mcvrr/perf.hpp"
#include "mcvrr/simulate.hpp"

using namespace mcvrr;

namespace {

double now_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <typename F>
double timed_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return now_ms(t0);
}

void bench_simulation() {
  SimConfig config;
  config.rule = {2, 3, Side::upper};
  config.p_in = 0.9615261083;  // the 370.4-ARL design point of the 2-of-3 rule
  config.replications = 200000;
  config.seed = 1;

  McMoments gaps_serial, gaps_parallel, step_serial;
  const double t_gaps_serial =
      timed_ms([&] { gaps_serial = mc_moments(config, Exec::serial, Sampler::gaps); });
  const double t_gaps_parallel =
      timed_ms([&] { gaps_parallel = mc_moments(config, Exec::parallel, Sampler::gaps); });
  const double t_step_serial =
      timed_ms([&] { step_serial = mc_moments(config, Exec::serial, Sampler::stepwise); });
  const double t_step_parallel =
      timed_ms([&] { mc_moments(config, Exec::parallel, Sampler::stepwise); });

  std::printf("mc_moments, 2/3 rule at p_in = %.6f, %llu replications\n", config.p_in,
              static_cast<unsigned long long>(config.replications));
  std::printf("  gaps      serial %8.1f ms   parallel %8.1f ms   speedup %.2fx\n",
              t_gaps_serial, t_gaps_parallel, t_gaps_serial / t_gaps_parallel);
  std::printf("  stepwise  serial %8.1f ms   parallel %8.1f ms   speedup %.2fx\n",
              t_step_serial, t_step_parallel, t_step_serial / t_step_parallel);
  std::printf("  gaps vs stepwise serial speedup %.2fx\n", t_step_serial / t_gaps_serial);
  std::printf("  arl_hat gaps %.4f (se %.4f), stepwise %.4f; identical across exec: %s\n\n",
              gaps_serial.arl, gaps_serial.se_arl, step_serial.arl,
              gaps_serial.arl == gaps_parallel.arl ? "yes" : "NO");
}

void bench_tables() {
  std::vector<TableCell> cells;
  for (int p : {2, 3, 4})
    for (double g0 : {0.1, 0.2, 0.3, 0.4, 0.5})
      for (int n : {5, 10, 15})
        for (auto [r, s] : {std::pair{2, 3}, {3, 4}, {4, 5}}) {
          TableCell c;
          c.params = {n, p, g0};
          c.rule = {r, s, Side::lower};
          c.kind = TableKind::limits;
          cells.push_back(c);
        }

  std::vector<TableRow> serial, parallel;
  const double t_serial =
      timed_ms([&] { serial = table_grid(cells, Exec::serial); });
  const double t_parallel =
      timed_ms([&] { parallel = table_grid(cells, Exec::parallel); });

  bool identical = serial.size() == parallel.size();
  for (size_t i = 0; identical && i < serial.size(); ++i)
    identical = serial[i].lcl == parallel[i].lcl && serial[i].ucl == parallel[i].ucl;

  std::printf("table_grid, %zu limit cells\n", cells.size());
  std::printf("  serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   identical: %s\n",
              t_serial, t_parallel, t_serial / t_parallel, identical ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n\n", omp_get_max_threads());
#else
  std::printf("OpenMP not available; parallel paths run serially\n\n");
#endif
  bench_simulation();
  bench_tables();
  return 0;
}
