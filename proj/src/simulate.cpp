#include "mcvrr/simulate.hpp"

#include <cmath>

#include "mcvrr/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mcvrr {

namespace {

SimRun run_stepwise(const RunRule& rule, double p_in, SplitMix64& gen, std::uint64_t cap) {
  RuleScanner scan(rule.r, rule.s);
  for (std::uint64_t t = 1; t <= cap; ++t) {
    const bool flag = gen.u01() >= p_in;
    if (scan.push(flag)) return {t, false};
  }
  return {cap, true};
}

// Jump flag to flag: gaps are iid geometric on {1,2,...} with success
// probability 1-p_in. With r-1 previous flag times in hand, the window
// holds r flags exactly when the (r-1)-th most recent one is at most s-1
// steps back.
SimRun run_gaps(const RunRule& rule, double p_in, SplitMix64& gen, std::uint64_t cap) {
  const double log_p = std::log(p_in);
  std::uint64_t ring[8];
  int filled = 0, pos = 0;
  const int keep = rule.r - 1;
  std::uint64_t t = 0;
  for (;;) {
    const double u = 1.0 - gen.u01();  // (0,1], keeps log finite
    const double gap_d = 1.0 + std::floor(std::log(u) / log_p);
    if (gap_d > static_cast<double>(cap - t)) return {cap, true};
    const std::uint64_t gap = static_cast<std::uint64_t>(gap_d);
    if (gap > cap - t) return {cap, true};  // double-rounding edge at the cap
    t += gap;
    if (keep == 0) return {t, false};
    if (filled == keep) {
      if (t - ring[pos] <= static_cast<std::uint64_t>(rule.s - 1)) return {t, false};
      ring[pos] = t;
      pos = pos + 1 == keep ? 0 : pos + 1;
    } else {
      ring[filled++] = t;
    }
  }
}

}  // namespace

SimRun simulate_run_length(const RunRule& rule, double p_in, SplitMix64& gen,
                           std::uint64_t cap, Sampler sampler) {
  validate(rule);
  if (!std::isfinite(p_in) || p_in <= 0.0 || p_in >= 1.0)
    throw argument_error("simulate: p_in must lie strictly inside (0,1)");
  if (cap == 0) throw argument_error("simulate: cap must be positive");
  return sampler == Sampler::stepwise ? run_stepwise(rule, p_in, gen, cap)
                                      : run_gaps(rule, p_in, gen, cap);
}

McMoments mc_moments(const SimConfig& config, Exec exec, Sampler sampler) {
  validate(config.rule);
  if (!std::isfinite(config.p_in) || config.p_in <= 0.0 || config.p_in >= 1.0)
    throw argument_error("simulate: p_in must lie strictly inside (0,1)");
  if (config.replications == 0)
    throw argument_error("simulate: need at least one replication");
  if (config.cap == 0) throw argument_error("simulate: cap must be positive");

  const long long reps = static_cast<long long>(config.replications);
  std::uint64_t sum = 0, n_capped = 0;
  unsigned __int128 sum_sq = 0;

#ifdef _OPENMP
  const bool parallel = exec == Exec::parallel;
#pragma omp parallel if (parallel)
  {
    std::uint64_t l_sum = 0, l_capped = 0;
    unsigned __int128 l_sum_sq = 0;
#pragma omp for schedule(dynamic, 64) nowait
    for (long long i = 0; i < reps; ++i) {
      SplitMix64 gen(substream_seed(config.seed, static_cast<std::uint64_t>(i)));
      SimRun run = sampler == Sampler::stepwise
                       ? run_stepwise(config.rule, config.p_in, gen, config.cap)
                       : run_gaps(config.rule, config.p_in, gen, config.cap);
      l_sum += run.t;
      l_sum_sq += static_cast<unsigned __int128>(run.t) * run.t;
      l_capped += run.capped ? 1 : 0;
    }
#pragma omp critical
    {
      sum += l_sum;
      sum_sq += l_sum_sq;
      n_capped += l_capped;
    }
  }
#else
  (void)exec;
  for (long long i = 0; i < reps; ++i) {
    SplitMix64 gen(substream_seed(config.seed, static_cast<std::uint64_t>(i)));
    SimRun run = sampler == Sampler::stepwise
                     ? run_stepwise(config.rule, config.p_in, gen, config.cap)
                     : run_gaps(config.rule, config.p_in, gen, config.cap);
    sum += run.t;
    sum_sq += static_cast<unsigned __int128>(run.t) * run.t;
    n_capped += run.capped ? 1 : 0;
  }
#endif

  McMoments out;
  out.replications = config.replications;
  out.capped = n_capped;
  const double r = static_cast<double>(config.replications);
  const double mean = static_cast<double>(sum) / r;
  out.arl = mean;
  if (config.replications >= 2) {
    double var = (static_cast<double>(sum_sq) - r * mean * mean) / (r - 1.0);
    if (var < 0.0) var = 0.0;  // cancellation guard
    const double sd = std::sqrt(var);
    out.sdrl = sd;
    out.se_arl = sd / std::sqrt(r);
    out.se_sdrl = sd / std::sqrt(2.0 * r);
  }
  return out;
}

}  // namespace mcvrr
