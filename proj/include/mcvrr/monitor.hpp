#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcvrr/dist.hpp"
#include "mcvrr/rulechain.hpp"

namespace mcvrr {

// One monitoring-period subgroup, in exactly one of two forms: raw rows
// (n observations of p variables) or precomputed summary statistics.
struct PhaseIISubgroup {
  long t = 0;
  std::vector<std::vector<double>> obs;  // raw form: n rows of p values
  std::vector<double> mean;              // summary form: p values
  std::vector<double> cov;               // summary form: p*p row-major, symmetric
  bool is_raw() const { return !obs.empty(); }
};

// Sample coefficient of variation of the subgroup: 1/sqrt(xbar' S^-1 xbar),
// covariance on n-1. Raw subgroups must carry exactly params.n rows of
// params.p_dim values; summary subgroups are taken as already reduced.
double gamma_hat(const PhaseIISubgroup& subgroup, const ChartParams& params);

struct SignalReport {
  std::vector<double> gamma_hats;
  std::vector<long> flagged;        // 1-based positions beyond the limit
  std::optional<long> signal_at;    // first position where the rule fires
  RunRule rule;
  double limit = 0.0;
};

// Scan the sequence against one limit under the run rule. Comparisons are
// strict (upper: gamma > limit flags; lower: gamma < limit flags); scanning
// continues past the first signal so every flag is reported.
SignalReport run_signal(const std::vector<double>& gamma_hats, const RunRule& rule,
                        double limit);
// Same, with the side stated explicitly (overrides rule.side).
SignalReport run_signal(const std::vector<double>& gamma_hats, RunRule rule,
                        double limit, Side side);

// Read subgroups from CSV. The header picks the form:
//   t,mean_1..mean_p,cov_11,cov_12,...,cov_pp   (upper triangle, row-major)
//   t,obs,x_1..x_p                              (one row per observation)
// Malformed input throws parse_error carrying the line number.
std::vector<PhaseIISubgroup> ingest(std::istream& in);
std::vector<PhaseIISubgroup> ingest_file(const std::string& path);

}  // namespace mcvrr
