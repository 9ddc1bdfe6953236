#pragma once

#include <limits>
#include <string>
#include <vector>

#include "mcvrr/design.hpp"

namespace mcvrr {

enum class Exec { serial, parallel };

// A shift interval for EARL/ESDRL. Decreasing ranges lie in (0,1], increasing
// ranges in [1,inf); tau=1 itself is never evaluated.
struct ShiftRange {
  double a = 0.0;
  double b = 0.0;
};

void validate(const ShiftRange& range);
bool is_decreasing(const ShiftRange& range);
std::string to_string(const ShiftRange& range);  // "[0.5,1)" / "(1,2]"

// EARL evaluation scheme. `grid` averages the ARL over the tau lattice of
// step `grid_step` inside the range (the scheme behind the published
// reference tables); `integral` is the uniform-density Gauss-Legendre
// integral over the same range.
enum class EarlMethod { grid, integral };

struct PerfReport {
  double tau = std::numeric_limits<double>::quiet_NaN();
  ShiftRange range{std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN()};
  bool is_range = false;
  double arl1 = std::numeric_limits<double>::quiet_NaN();
  double sdrl1 = std::numeric_limits<double>::quiet_NaN();
  double earl = std::numeric_limits<double>::quiet_NaN();
  double esdrl = std::numeric_limits<double>::quiet_NaN();      // mean of SDRL(tau)
  double esdrl_rms = std::numeric_limits<double>::quiet_NaN();  // sqrt of mean run-length variance
};

// Out-of-control moments of a designed chart at shift tau (tau=1 gives ARL0).
PerfReport perf_at_shift(const DesignedChart& chart, double tau);

// Percent ARL advantage of the candidate over the baseline:
// 100 (baseline - candidate) / baseline. Positive = candidate detects faster.
double delta_index(double arl_baseline, double arl_candidate);

// ARL at shift tau of the Shewhart (1/1) chart designed at arl0 on the same
// process; the baseline of the delta index.
double shewhart_baseline(const ChartParams& params, Side side, double arl0, double tau);

// The tau lattice used by the grid EARL: decreasing [a,b) -> a, a+h, ...;
// increasing (a,b] -> a+h, ..., b. Never contains tau = 1.
std::vector<double> earl_grid_taus(const ShiftRange& range, double step);

// EARL/ESDRL over a shift range matching the chart's side.
PerfReport earl(const DesignedChart& chart, const ShiftRange& range,
                EarlMethod method = EarlMethod::grid, double grid_step = 0.05,
                int nodes = 64);

// Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// ---- table grids ----------------------------------------------------------

enum class TableKind {
  limits,      // both one-sided control limits
  shift_perf,  // ARL1/SDRL1 at a fixed shift
  delta_arl,   // ARL delta index vs the Shewhart baseline at a fixed shift
  earl_range,  // EARL/ESDRL over a shift range
  delta_earl,  // EARL delta index vs the Shewhart baseline over a range
};

struct TableCell {
  ChartParams params;
  RunRule rule;  // side used by the shift/range kinds
  double arl0 = 370.4;
  TableKind kind = TableKind::limits;
  double tau = 0.0;    // shift_perf / delta_arl
  ShiftRange range;    // earl_range / delta_earl
};

constexpr double table_nan = std::numeric_limits<double>::quiet_NaN();

struct TableRow {
  TableCell cell;
  double lcl = table_nan, ucl = table_nan;
  double arl1 = table_nan, sdrl1 = table_nan;
  double earl = table_nan, esdrl = table_nan;
  double delta = table_nan;
  std::string error;  // nonempty when this cell failed; other cells unaffected
};

// Evaluate every cell (independent, deterministic order preserved). The
// parallel path distributes cells over OpenMP threads; results are identical
// to the serial path.
std::vector<TableRow> table_grid(const std::vector<TableCell>& cells,
                                 Exec exec = Exec::parallel);

}  // namespace mcvrr
