#pragma once

#include "mcvrr/dist.hpp"
#include "mcvrr/rulechain.hpp"

namespace mcvrr {

struct DesignSpec {
  ChartParams params;
  RunRule rule;
  double arl0 = 370.4;
};

// A solved one-sided chart: the single finite limit (LCL for a lower chart,
// UCL for an upper chart) and the in-control-interval probability achieving
// the target ARL0.
struct DesignedChart {
  DesignSpec spec;
  double limit = 0.0;
  InControlProb p_in_star;
};

// The p_in at which the rule's chain has ARL = arl0, by bisection (ARL is
// strictly increasing in p_in). Distribution-free: depends only on the rule.
// Throws infeasible_error when arl0 <= r (no chart can signal before sample r).
InControlProb solve_p_in(const RunRule& rule, double arl0);

// Control limit achieving the target: one quantile evaluation at tau=1 once
// p_in* is known (lower side uses the 1-p* quantile, upper side the p*
// quantile).
DesignedChart design_limits(DesignSpec spec, Side side);
DesignedChart design_limits(const DesignSpec& spec);  // side taken from spec.rule

// Recompute the tau=1 moments end-to-end from the stored limit
// (limit -> p_in -> chain -> moments); a designed chart returns ARL0.
RunLengthMoments verify_design(const DesignedChart& chart);

}  // namespace mcvrr
