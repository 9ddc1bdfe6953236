#include "mcvrr/perf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "mcvrr/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mcvrr {

void validate(const ShiftRange& range) {
  if (!std::isfinite(range.a) || !std::isfinite(range.b) || range.a <= 0.0)
    throw argument_error("shift range endpoints must be finite and positive");
  if (!(range.a < range.b))
    throw argument_error("shift range must have a < b");
  if (!(range.b <= 1.0 || range.a >= 1.0))
    throw argument_error("shift range must lie within (0,1] or [1,inf), not straddle tau=1");
}

bool is_decreasing(const ShiftRange& range) { return range.b <= 1.0; }

std::string to_string(const ShiftRange& range) {
  char buf[64];
  if (is_decreasing(range))
    std::snprintf(buf, sizeof buf, "[%g,%g)", range.a, range.b);
  else
    std::snprintf(buf, sizeof buf, "(%g,%g]", range.a, range.b);
  return buf;
}

static RunLengthMoments moments_at(const DesignedChart& chart, double tau) {
  const DesignSpec& spec = chart.spec;
  InControlProb p = p_in_of_limit(spec.params, spec.rule.side, chart.limit, tau);
  RuleChain chain = build_chain(spec.rule, p);
  return run_length_moments(chain);
}

PerfReport perf_at_shift(const DesignedChart& chart, double tau) {
  validate(chart.spec.params);
  validate(chart.spec.rule);
  RunLengthMoments m = moments_at(chart, tau);
  PerfReport rep;
  rep.tau = tau;
  rep.arl1 = m.arl;
  rep.sdrl1 = m.sdrl;
  return rep;
}

double delta_index(double arl_baseline, double arl_candidate) {
  if (!std::isfinite(arl_baseline) || arl_baseline <= 0.0)
    throw argument_error("delta_index: baseline ARL must be finite and positive");
  if (!std::isfinite(arl_candidate) || arl_candidate <= 0.0)
    throw argument_error("delta_index: candidate ARL must be finite and positive");
  return 100.0 * (arl_baseline - arl_candidate) / arl_baseline;
}

double shewhart_baseline(const ChartParams& params, Side side, double arl0, double tau) {
  DesignSpec spec;
  spec.params = params;
  spec.rule = RunRule{1, 1, side};
  spec.arl0 = arl0;
  DesignedChart chart = design_limits(spec);
  InControlProb p = p_in_of_limit(params, side, chart.limit, tau);
  return 1.0 / (1.0 - p.p_in);
}

std::vector<double> earl_grid_taus(const ShiftRange& range, double step) {
  validate(range);
  if (!std::isfinite(step) || step <= 0.0)
    throw argument_error("earl: grid step must be finite and positive");
  long long k_count = std::llround((range.b - range.a) / step);
  if (k_count < 1) k_count = 1;
  const bool dec = is_decreasing(range);
  std::vector<double> taus(static_cast<size_t>(k_count));
  for (long long k = 0; k < k_count; ++k)
    taus[static_cast<size_t>(k)] = dec ? range.a + static_cast<double>(k) * step
                                       : range.a + static_cast<double>(k + 1) * step;
  return taus;
}

PerfReport earl(const DesignedChart& chart, const ShiftRange& range,
                EarlMethod method, double grid_step, int nodes) {
  validate(chart.spec.params);
  validate(chart.spec.rule);
  validate(range);
  const bool dec = is_decreasing(range);
  if (dec && chart.spec.rule.side != Side::lower)
    throw argument_error("earl: decreasing shift range requires a lower-sided chart");
  if (!dec && chart.spec.rule.side != Side::upper)
    throw argument_error("earl: increasing shift range requires an upper-sided chart");

  PerfReport rep;
  rep.is_range = true;
  rep.range = range;

  double sum_arl = 0.0, sum_sdrl = 0.0, sum_mu2 = 0.0;
  if (method == EarlMethod::grid) {
    std::vector<double> taus = earl_grid_taus(range, grid_step);
    for (double tau : taus) {
      RunLengthMoments m = moments_at(chart, tau);
      sum_arl += m.arl;
      sum_sdrl += m.sdrl;
      sum_mu2 += m.mu2;
    }
    const double inv = 1.0 / static_cast<double>(taus.size());
    rep.earl = sum_arl * inv;
    rep.esdrl = sum_sdrl * inv;
    rep.esdrl_rms = std::sqrt(sum_mu2 * inv);
  } else {
    if (nodes < 1) throw argument_error("earl: need at least one quadrature node");
    std::vector<double> x, w;
    gauss_legendre(nodes, x, w);
    const double mid = 0.5 * (range.a + range.b);
    const double hw = 0.5 * (range.b - range.a);
    for (int i = 0; i < nodes; ++i) {
      RunLengthMoments m = moments_at(chart, mid + hw * x[i]);
      sum_arl += w[i] * m.arl;
      sum_sdrl += w[i] * m.sdrl;
      sum_mu2 += w[i] * m.mu2;
    }
    // uniform shift density over [a,b]: 1/(b-a) * integral = sum * hw / (b-a) = sum / 2
    rep.earl = 0.5 * sum_arl;
    rep.esdrl = 0.5 * sum_sdrl;
    rep.esdrl_rms = std::sqrt(0.5 * sum_mu2);
  }
  return rep;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw argument_error("gauss_legendre: n must be >= 1");
  x.assign(static_cast<size_t>(n), 0.0);
  w.assign(static_cast<size_t>(n), 0.0);
  const double pi = 3.14159265358979323846;
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double p1 = 0.0, pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[static_cast<size_t>(i)] = -z;
    x[static_cast<size_t>(n - 1 - i)] = z;
    double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<size_t>(i)] = wi;
    w[static_cast<size_t>(n - 1 - i)] = wi;
  }
}

// ---- table grids ----------------------------------------------------------

namespace {

using PStarKey = std::tuple<int, int, double>;  // r, s, arl0

struct PStarEntry {
  double p_star = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

DesignedChart make_chart(const TableCell& cell, Side side, double p_star) {
  DesignSpec spec;
  spec.params = cell.params;
  spec.rule = cell.rule;
  spec.rule.side = side;
  spec.arl0 = cell.arl0;
  ShiftedDelta d0 = delta_of(cell.params, 1.0);
  const double alpha = side == Side::lower ? 1.0 - p_star : p_star;
  return DesignedChart{spec, mcv_quantile(alpha, cell.params, d0.delta1), p_star};
}

TableRow compute_cell(const TableCell& cell, const std::map<PStarKey, PStarEntry>& p_stars) {
  TableRow row;
  row.cell = cell;
  try {
    const PStarEntry& entry = p_stars.at(PStarKey{cell.rule.r, cell.rule.s, cell.arl0});
    if (!entry.error.empty()) {
      row.error = entry.error;
      return row;
    }
    const double p_star = entry.p_star;
    switch (cell.kind) {
      case TableKind::limits: {
        row.lcl = make_chart(cell, Side::lower, p_star).limit;
        row.ucl = make_chart(cell, Side::upper, p_star).limit;
        break;
      }
      case TableKind::shift_perf: {
        DesignedChart chart = make_chart(cell, cell.rule.side, p_star);
        PerfReport rep = perf_at_shift(chart, cell.tau);
        row.arl1 = rep.arl1;
        row.sdrl1 = rep.sdrl1;
        break;
      }
      case TableKind::delta_arl: {
        DesignedChart chart = make_chart(cell, cell.rule.side, p_star);
        PerfReport rep = perf_at_shift(chart, cell.tau);
        row.arl1 = rep.arl1;
        row.sdrl1 = rep.sdrl1;
        row.delta = delta_index(
            shewhart_baseline(cell.params, cell.rule.side, cell.arl0, cell.tau), rep.arl1);
        break;
      }
      case TableKind::earl_range: {
        DesignedChart chart = make_chart(cell, cell.rule.side, p_star);
        PerfReport rep = earl(chart, cell.range);
        row.earl = rep.earl;
        row.esdrl = rep.esdrl;
        break;
      }
      case TableKind::delta_earl: {
        DesignedChart chart = make_chart(cell, cell.rule.side, p_star);
        PerfReport rep = earl(chart, cell.range);
        row.earl = rep.earl;
        row.esdrl = rep.esdrl;
        DesignSpec base_spec;
        base_spec.params = cell.params;
        base_spec.rule = RunRule{1, 1, cell.rule.side};
        base_spec.arl0 = cell.arl0;
        PerfReport base = earl(design_limits(base_spec), cell.range);
        row.delta = delta_index(base.earl, rep.earl);
        break;
      }
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<TableRow> table_grid(const std::vector<TableCell>& cells, Exec exec) {
  // One p_in solve per distinct (rule, arl0); the chain inversion does not
  // depend on the process parameters or the side.
  std::map<PStarKey, PStarEntry> p_stars;
  std::vector<TableRow> rows(cells.size());
  for (const TableCell& cell : cells) {
    PStarKey key{cell.rule.r, cell.rule.s, cell.arl0};
    if (p_stars.count(key)) continue;
    PStarEntry entry;
    try {
      RunRule rule = cell.rule;
      entry.p_star = solve_p_in(rule, cell.arl0).p_in;
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
    p_stars[key] = entry;
  }

  const long long count = static_cast<long long>(cells.size());
#ifdef _OPENMP
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i)
      rows[static_cast<size_t>(i)] =
          compute_cell(cells[static_cast<size_t>(i)], p_stars);
    return rows;
  }
#else
  (void)exec;
#endif
  for (long long i = 0; i < count; ++i)
    rows[static_cast<size_t>(i)] = compute_cell(cells[static_cast<size_t>(i)], p_stars);
  return rows;
}

}  // namespace mcvrr
