#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcvrr/dist.hpp"
#include "mcvrr/linalg.hpp"

namespace mcvrr {

enum class Side { lower, upper };

const char* to_string(Side side);
Side side_from_string(const std::string& s);

// An r-of-s run rule on one side of the chart: signal when at least r of the
// last s plotted points fall beyond the control limit. (1,1) is the Shewhart
// chart.
struct RunRule {
  int r = 1;
  int s = 1;
  Side side = Side::upper;
};

void validate(const RunRule& rule);
std::string to_string(const RunRule& rule);  // "r/s"

// Probability that a plotted point falls inside the control interval.
struct InControlProb {
  double p_in = 0.0;
};

// Embedded absorbing Markov chain of a run rule: transient states are the
// bit-histories of the last s-1 outcomes (1 = point beyond the limit)
// containing at most r-1 ones, in lexicographic order; the all-zeros history
// is the initial state.
struct RuleChain {
  SquareMatrix q;                        // transient-to-transient transition probabilities
  std::vector<double> init;              // initial distribution (unit mass on all-zeros history)
  std::vector<std::string> state_labels; // history bit strings, oldest outcome first
  int init_index = 0;
};

struct RunLengthMoments {
  double arl = 0.0;   // nu1
  double sdrl = 0.0;  // sqrt(mu2)
  double nu1 = 0.0;   // E[RL]
  double nu2 = 0.0;   // E[RL(RL-1)]
  double mu2 = 0.0;   // Var[RL]
};

// In-control-interval probability of a one-sided chart with the given limit
// at shift tau (tau=1 for the in-control state).
InControlProb p_in_of_limit(const ChartParams& params, Side side, double limit, double tau);

// Build the transient-state chain for the rule at flag probability 1 - p_in.
// p_in outside [1e-12, 1-1e-12] is rejected (the chain would degenerate).
RuleChain build_chain(const RunRule& rule, InControlProb p);

// Exact ARL and SDRL from two dense linear solves of (I - Q).
RunLengthMoments run_length_moments(const RuleChain& chain);

// P(RL > t) = init' Q^t 1, by matrix exponentiation.
double run_length_survival(const RuleChain& chain, std::uint64_t t);

// Streaming r-of-s window scanner over a flag sequence; O(s) state.
// push() returns true at every time t where at least r of the last
// min(t, s) outcomes are flags.
class RuleScanner {
 public:
  RuleScanner(int r, int s);
  bool push(bool flag);
  std::uint64_t time() const { return t_; }

 private:
  int r_, s_, count_ = 0;
  std::uint32_t window_ = 0;  // bit i set = outcome (t - i) was a flag
  std::uint64_t t_ = 0;
};

}  // namespace mcvrr
