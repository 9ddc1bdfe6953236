#pragma once

#include <cstdint>
#include <limits>

#include "mcvrr/perf.hpp"
#include "mcvrr/rng.hpp"
#include "mcvrr/rulechain.hpp"

namespace mcvrr {

// How a single run length is sampled. `stepwise` draws one Bernoulli outcome
// per time step through the streaming scanner; `gaps` jumps between flags
// with geometric gap draws, so its cost scales with the number of flags
// rather than the run length. The two agree in distribution, not draw for
// draw.
enum class Sampler { stepwise, gaps };

struct SimConfig {
  RunRule rule;
  double p_in = 0.0;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  std::uint64_t cap = 100'000'000;  // truncation point for a single run
};

struct SimRun {
  std::uint64_t t = 0;
  bool capped = false;
};

// One run length for the given rule at in-control probability p_in.
SimRun simulate_run_length(const RunRule& rule, double p_in, SplitMix64& gen,
                           std::uint64_t cap, Sampler sampler = Sampler::gaps);

struct McMoments {
  double arl = std::numeric_limits<double>::quiet_NaN();
  double sdrl = std::numeric_limits<double>::quiet_NaN();
  double se_arl = std::numeric_limits<double>::quiet_NaN();
  double se_sdrl = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t replications = 0;
  std::uint64_t capped = 0;  // replications truncated at the cap
};

// Monte Carlo ARL/SDRL with standard errors. Replication i always uses
// substream_seed(config.seed, i) and integer moment accumulators, so serial
// and parallel execution produce bit-identical estimates.
McMoments mc_moments(const SimConfig& config, Exec exec = Exec::parallel,
                     Sampler sampler = Sampler::gaps);

}  // namespace mcvrr
