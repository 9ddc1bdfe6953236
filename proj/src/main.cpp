#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mcvrr/csv.hpp"
#include "mcvrr/design.hpp"
#include "mcvrr/errors.hpp"
#include "mcvrr/monitor.hpp"
#include "mcvrr/perf.hpp"
#include "mcvrr/simulate.hpp"

using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_args = 2;
constexpr int exit_numeric = 3;
constexpr int exit_expectation = 4;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// NaN marks an absent report field: empty CSV cell, null JSON value.
std::string report_cell(double v) { return std::isnan(v) ? "" : fmt("%.6g", v); }

std::string csv_field(const std::string& s) {
  if (s.find(',') == std::string::npos) return s;
  return "\"" + s + "\"";
}

mcvrr::RunRule parse_rule(const std::string& text, mcvrr::Side side) {
  const size_t slash = text.find('/');
  size_t used_r = 0, used_s = 0;
  int r = 0, s = 0;
  try {
    r = std::stoi(text, &used_r);
    if (slash != std::string::npos) s = std::stoi(text.substr(slash + 1), &used_s);
  } catch (const std::exception&) {
    throw mcvrr::argument_error("--rule: expected \"r/s\", got '" + text + "'");
  }
  if (slash == std::string::npos || used_r != slash ||
      used_s != text.size() - slash - 1)
    throw mcvrr::argument_error("--rule: expected \"r/s\", got '" + text + "'");
  mcvrr::RunRule rule{r, s, side};
  try {
    mcvrr::validate(rule);
  } catch (const mcvrr::argument_error& e) {
    throw mcvrr::argument_error(std::string("--rule: ") + e.what());
  }
  return rule;
}

mcvrr::ShiftRange parse_range(const std::string& text) {
  std::istringstream in(text);
  double a = 0, b = 0;
  char comma = 0;
  if (!(in >> a >> comma >> b) || comma != ',' || !(in >> std::ws).eof())
    throw mcvrr::argument_error("--range: expected \"a,b\", got '" + text + "'");
  mcvrr::ShiftRange range{a, b};
  try {
    mcvrr::validate(range);
  } catch (const mcvrr::argument_error& e) {
    throw mcvrr::argument_error(std::string("--range: ") + e.what());
  }
  return range;
}

// ---- report rows (perf/earl/tables 2-4 and 7 share this schema) ----------

struct ReportRow {
  int n = 0, p_dim = 0;
  double gamma0 = 0;
  std::string rule, side, tau_or_range;
  double arl1 = mcvrr::table_nan, sdrl1 = mcvrr::table_nan;
  double earl = mcvrr::table_nan, esdrl = mcvrr::table_nan;
};

const char* report_header = "n,p_dim,gamma0,rule,side,tau_or_range,arl1,sdrl1,earl,esdrl";

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << report_header << "\n";
  for (const ReportRow& r : rows) {
    out << r.n << ',' << r.p_dim << ',' << fmt("%g", r.gamma0) << ','
        << csv_field(r.rule) << ',' << r.side << ',' << csv_field(r.tau_or_range)
        << ',' << report_cell(r.arl1) << ',' << report_cell(r.sdrl1) << ','
        << report_cell(r.earl) << ',' << report_cell(r.esdrl) << "\n";
  }
}

json report_json_value(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

void write_report_json(std::ostream& out, const std::vector<ReportRow>& rows) {
  json arr = json::array();
  for (const ReportRow& r : rows) {
    arr.push_back({{"n", r.n},
                   {"p_dim", r.p_dim},
                   {"gamma0", r.gamma0},
                   {"rule", r.rule},
                   {"side", r.side},
                   {"tau_or_range", r.tau_or_range},
                   {"arl1", report_json_value(r.arl1)},
                   {"sdrl1", report_json_value(r.sdrl1)},
                   {"earl", report_json_value(r.earl)},
                   {"esdrl", report_json_value(r.esdrl)}});
  }
  out << arr.dump(2) << "\n";
}

// ---- design ---------------------------------------------------------------

struct DesignArgs {
  int n = 0, p_dim = 0;
  double gamma0 = 0, arl0 = 370.4;
  std::string rule_text, side_text;
  bool both_sides = false, round3 = false;
};

int run_design(const DesignArgs& a) {
  mcvrr::DesignSpec spec;
  spec.params = mcvrr::ChartParams{a.n, a.p_dim, a.gamma0};
  spec.arl0 = a.arl0;
  const char* f = a.round3 ? "%.3f" : "%.6f";
  if (a.both_sides) {
    spec.rule = parse_rule(a.rule_text, mcvrr::Side::lower);
    const double lcl = mcvrr::design_limits(spec, mcvrr::Side::lower).limit;
    const double ucl = mcvrr::design_limits(spec, mcvrr::Side::upper).limit;
    std::cout << fmt(f, lcl) << ' ' << fmt(f, ucl) << "\n";
    return exit_ok;
  }
  if (a.side_text.empty())
    throw mcvrr::argument_error("--side is required unless --both-sides is given");
  spec.rule = parse_rule(a.rule_text, mcvrr::side_from_string(a.side_text));
  std::cout << fmt(f, mcvrr::design_limits(spec).limit) << "\n";
  return exit_ok;
}

// ---- perf -----------------------------------------------------------------

struct PerfArgs {
  int n = 0, p_dim = 0;
  double gamma0 = 0, arl0 = 370.4;
  std::string rule_text, side_text = "upper", format = "csv", out_path;
  std::vector<double> taus;
};

int run_perf(const PerfArgs& a) {
  mcvrr::DesignSpec spec;
  spec.params = mcvrr::ChartParams{a.n, a.p_dim, a.gamma0};
  spec.arl0 = a.arl0;
  spec.rule = parse_rule(a.rule_text, mcvrr::side_from_string(a.side_text));
  mcvrr::DesignedChart chart = mcvrr::design_limits(spec);
  std::vector<ReportRow> rows;
  for (double tau : a.taus) {
    mcvrr::PerfReport rep = mcvrr::perf_at_shift(chart, tau);
    ReportRow row;
    row.n = a.n;
    row.p_dim = a.p_dim;
    row.gamma0 = a.gamma0;
    row.rule = mcvrr::to_string(spec.rule);
    row.side = mcvrr::to_string(spec.rule.side);
    row.tau_or_range = fmt("%g", tau);
    row.arl1 = rep.arl1;
    row.sdrl1 = rep.sdrl1;
    rows.push_back(row);
  }
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!a.out_path.empty()) {
    file.open(a.out_path);
    if (!file) throw mcvrr::argument_error("--out: cannot open '" + a.out_path + "'");
    out = &file;
  }
  if (a.format == "json")
    write_report_json(*out, rows);
  else
    write_report_csv(*out, rows);
  return exit_ok;
}

// ---- earl -----------------------------------------------------------------

struct EarlArgs {
  int n = 0, p_dim = 0;
  double gamma0 = 0, arl0 = 370.4, step = 0.05;
  int nodes = 64;
  bool integral = false;
  std::string rule_text, side_text = "upper", range_text, format = "csv", out_path;
};

int run_earl(const EarlArgs& a) {
  mcvrr::DesignSpec spec;
  spec.params = mcvrr::ChartParams{a.n, a.p_dim, a.gamma0};
  spec.arl0 = a.arl0;
  mcvrr::Side side = mcvrr::side_from_string(a.side_text);
  spec.rule = parse_rule(a.rule_text, side);
  mcvrr::ShiftRange range =
      a.range_text.empty()
          ? (side == mcvrr::Side::lower ? mcvrr::ShiftRange{0.5, 1.0}
                                        : mcvrr::ShiftRange{1.0, 2.0})
          : parse_range(a.range_text);
  mcvrr::DesignedChart chart = mcvrr::design_limits(spec);
  mcvrr::PerfReport rep =
      mcvrr::earl(chart, range,
                  a.integral ? mcvrr::EarlMethod::integral : mcvrr::EarlMethod::grid,
                  a.step, a.nodes);
  ReportRow row;
  row.n = a.n;
  row.p_dim = a.p_dim;
  row.gamma0 = a.gamma0;
  row.rule = mcvrr::to_string(spec.rule);
  row.side = mcvrr::to_string(side);
  row.tau_or_range = mcvrr::to_string(range);
  row.earl = rep.earl;
  row.esdrl = rep.esdrl;
  std::vector<ReportRow> rows{row};
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!a.out_path.empty()) {
    file.open(a.out_path);
    if (!file) throw mcvrr::argument_error("--out: cannot open '" + a.out_path + "'");
    out = &file;
  }
  if (a.format == "json")
    write_report_json(*out, rows);
  else
    write_report_csv(*out, rows);
  return exit_ok;
}

// ---- tables ---------------------------------------------------------------

struct SubsetFilter {
  std::optional<int> n, p_dim;
  std::optional<double> gamma0, tau;
  std::optional<std::string> rule;
  std::optional<mcvrr::Side> side;
};

SubsetFilter parse_subset(const std::string& text) {
  SubsetFilter f;
  if (text.empty()) return f;
  for (const std::string& part : mcvrr::split_csv_line(text)) {
    const size_t eq = part.find('=');
    if (eq == std::string::npos)
      throw mcvrr::argument_error("--subset: expected key=value, got '" + part + "'");
    const std::string key = part.substr(0, eq), value = part.substr(eq + 1);
    try {
      if (key == "n")
        f.n = std::stoi(value);
      else if (key == "p")
        f.p_dim = std::stoi(value);
      else if (key == "gamma0")
        f.gamma0 = std::stod(value);
      else if (key == "tau")
        f.tau = std::stod(value);
      else if (key == "rule")
        f.rule = value;
      else if (key == "side")
        f.side = value == "D"   ? mcvrr::Side::lower
                 : value == "I" ? mcvrr::Side::upper
                                : mcvrr::side_from_string(value);
      else
        throw mcvrr::argument_error("--subset: unknown key '" + key + "'");
    } catch (const mcvrr::argument_error&) {
      throw;
    } catch (const std::exception&) {
      throw mcvrr::argument_error("--subset: bad value for '" + key + "'");
    }
  }
  return f;
}

bool close_to(double a, double b) { return std::fabs(a - b) <= 1e-9; }

bool keep_cell(const SubsetFilter& f, const mcvrr::TableCell& cell) {
  if (f.n && *f.n != cell.params.n) return false;
  if (f.p_dim && *f.p_dim != cell.params.p_dim) return false;
  if (f.gamma0 && !close_to(*f.gamma0, cell.params.gamma0)) return false;
  if (f.rule && *f.rule != mcvrr::to_string(cell.rule)) return false;
  if (f.tau) {
    if (cell.kind == mcvrr::TableKind::shift_perf ||
        cell.kind == mcvrr::TableKind::delta_arl) {
      if (!close_to(*f.tau, cell.tau)) return false;
    } else {
      return false;  // tau filter never matches a limits/range cell
    }
  }
  if (f.side) {
    if (cell.kind == mcvrr::TableKind::limits) return false;
    if (*f.side != cell.rule.side) return false;
  }
  return true;
}

struct TablesArgs {
  int table = 0;
  std::string subset_text, out_path;
  bool serial = false;
};

const double table_gamma0s[] = {0.1, 0.2, 0.3, 0.4, 0.5};
const int table_ns[] = {5, 10, 15};
const int table_rules[][2] = {{2, 3}, {3, 4}, {4, 5}};
const double table_taus[] = {0.5, 0.75, 0.9, 1.1, 1.25, 1.5};
const int table_ps[] = {2, 3, 4};

std::vector<mcvrr::TableCell> build_cells(int table) {
  using mcvrr::Side;
  using mcvrr::TableCell;
  using mcvrr::TableKind;
  std::vector<TableCell> cells;
  auto cell = [](int n, int p, double g0, int r, int s, Side side) {
    TableCell c;
    c.params = mcvrr::ChartParams{n, p, g0};
    c.rule = mcvrr::RunRule{r, s, side};
    return c;
  };
  switch (table) {
    case 1:
      for (int p : table_ps)
        for (double g0 : table_gamma0s)
          for (auto& rs : table_rules)
            for (int n : table_ns) {
              TableCell c = cell(n, p, g0, rs[0], rs[1], Side::lower);
              c.kind = TableKind::limits;
              cells.push_back(c);
            }
      break;
    case 2:
    case 3:
    case 4: {
      const int p = table;
      for (double g0 : table_gamma0s)
        for (double tau : table_taus)
          for (auto& rs : table_rules)
            for (int n : table_ns) {
              TableCell c =
                  cell(n, p, g0, rs[0], rs[1], tau < 1 ? Side::lower : Side::upper);
              c.kind = TableKind::shift_perf;
              c.tau = tau;
              cells.push_back(c);
            }
      break;
    }
    case 5:
      for (int p : table_ps)
        for (double g0 : table_gamma0s)
          for (double tau : table_taus)
            for (auto& rs : table_rules)
              for (int n : table_ns) {
                TableCell c =
                    cell(n, p, g0, rs[0], rs[1], tau < 1 ? Side::lower : Side::upper);
                c.kind = TableKind::delta_arl;
                c.tau = tau;
                cells.push_back(c);
              }
      break;
    case 6:
    case 7:
      for (int p : table_ps)
        for (double g0 : table_gamma0s)
          for (auto& rs : table_rules)
            for (int n : table_ns)
              for (int dir = 0; dir < 2; ++dir) {
                TableCell c = cell(n, p, g0, rs[0], rs[1],
                                   dir == 0 ? Side::lower : Side::upper);
                c.kind = table == 6 ? TableKind::delta_earl : TableKind::earl_range;
                c.range = dir == 0 ? mcvrr::ShiftRange{0.5, 1.0}
                                   : mcvrr::ShiftRange{1.0, 2.0};
                cells.push_back(c);
              }
      break;
    default:
      throw mcvrr::argument_error("--table: expected 1..7");
  }
  return cells;
}

int run_tables(const TablesArgs& a) {
  std::vector<mcvrr::TableCell> cells = build_cells(a.table);
  const SubsetFilter filter = parse_subset(a.subset_text);
  std::vector<mcvrr::TableCell> kept;
  for (const auto& c : cells)
    if (keep_cell(filter, c)) kept.push_back(c);
  std::vector<mcvrr::TableRow> rows =
      mcvrr::table_grid(kept, a.serial ? mcvrr::Exec::serial : mcvrr::Exec::parallel);
  for (const auto& row : rows)
    if (!row.error.empty())
      throw mcvrr::numerical_error("table cell failed: " + row.error);

  std::ostringstream out;
  if (a.table == 1) {
    out << "n,p_dim,gamma0,rule,lcl,ucl\n";
    for (const auto& row : rows)
      out << row.cell.params.n << ',' << row.cell.params.p_dim << ','
          << fmt("%g", row.cell.params.gamma0) << ','
          << csv_field(mcvrr::to_string(row.cell.rule)) << ','
          << fmt("%.6g", row.lcl) << ',' << fmt("%.6g", row.ucl) << "\n";
  } else if (a.table == 5) {
    out << "n,p_dim,gamma0,rule,side,tau,delta_a\n";
    for (const auto& row : rows)
      out << row.cell.params.n << ',' << row.cell.params.p_dim << ','
          << fmt("%g", row.cell.params.gamma0) << ','
          << csv_field(mcvrr::to_string(row.cell.rule)) << ','
          << mcvrr::to_string(row.cell.rule.side) << ',' << fmt("%g", row.cell.tau)
          << ',' << fmt("%.6g", row.delta) << "\n";
  } else if (a.table == 6) {
    out << "n,p_dim,gamma0,rule,side,range,delta_e\n";
    for (const auto& row : rows)
      out << row.cell.params.n << ',' << row.cell.params.p_dim << ','
          << fmt("%g", row.cell.params.gamma0) << ','
          << csv_field(mcvrr::to_string(row.cell.rule)) << ','
          << mcvrr::to_string(row.cell.rule.side) << ','
          << csv_field(mcvrr::to_string(row.cell.range)) << ','
          << fmt("%.6g", row.delta) << "\n";
  } else {
    std::vector<ReportRow> report;
    for (const auto& row : rows) {
      ReportRow r;
      r.n = row.cell.params.n;
      r.p_dim = row.cell.params.p_dim;
      r.gamma0 = row.cell.params.gamma0;
      r.rule = mcvrr::to_string(row.cell.rule);
      r.side = mcvrr::to_string(row.cell.rule.side);
      if (a.table == 7) {
        r.tau_or_range = mcvrr::to_string(row.cell.range);
        r.earl = row.earl;
        r.esdrl = row.esdrl;
      } else {
        r.tau_or_range = fmt("%g", row.cell.tau);
        r.arl1 = row.arl1;
        r.sdrl1 = row.sdrl1;
      }
      report.push_back(r);
    }
    write_report_csv(out, report);
  }

  if (a.out_path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream file(a.out_path, std::ios::binary);
    if (!file) throw mcvrr::argument_error("--out: cannot open '" + a.out_path + "'");
    file << out.str();
  }
  return exit_ok;
}

// ---- monitor --------------------------------------------------------------

struct MonitorArgs {
  std::string input, gamma_col, side_text = "upper", json_out, plot_csv;
  std::vector<std::string> rule_texts;
  std::vector<double> limits;
  bool expect_signal = false;
};

std::string plot_path_for(const std::string& base, const mcvrr::RunRule& rule,
                          bool multiple) {
  if (!multiple) return base;
  const std::string tag = std::to_string(rule.r) + "of" + std::to_string(rule.s);
  const size_t dot = base.find_last_of('.');
  const size_t slash = base.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return base + "." + tag;
  return base.substr(0, dot) + "." + tag + base.substr(dot);
}

int run_monitor(const MonitorArgs& a) {
  if (a.rule_texts.empty())
    throw mcvrr::argument_error("--rule: at least one rule is required");
  if (a.limits.size() != a.rule_texts.size())
    throw mcvrr::argument_error("--limit: need exactly one limit per --rule (got " +
                                std::to_string(a.limits.size()) + " limits for " +
                                std::to_string(a.rule_texts.size()) + " rules)");
  const mcvrr::Side side = mcvrr::side_from_string(a.side_text);

  std::vector<long> times;
  std::vector<double> gammas;
  if (!a.gamma_col.empty()) {
    mcvrr::CsvTable table = mcvrr::read_csv_file(a.input);
    const int col = table.column(a.gamma_col);
    if (col < 0)
      throw mcvrr::argument_error("--gamma-col: no column '" + a.gamma_col + "' in '" +
                                  a.input + "'");
    const int tcol = table.column("t");
    for (size_t i = 0; i < table.rows.size(); ++i) {
      gammas.push_back(table.rows[i][static_cast<size_t>(col)]);
      times.push_back(tcol >= 0 ? static_cast<long>(table.rows[i][static_cast<size_t>(tcol)])
                                : static_cast<long>(i) + 1);
    }
  } else {
    std::vector<mcvrr::PhaseIISubgroup> subgroups = mcvrr::ingest_file(a.input);
    for (const auto& sg : subgroups) {
      int p = 0, n = 0;
      if (sg.is_raw()) {
        n = static_cast<int>(sg.obs.size());
        p = static_cast<int>(sg.obs.front().size());
      } else {
        p = static_cast<int>(sg.mean.size());
        n = p + 1;  // summary statistics are already reduced; n only gates raw input
      }
      mcvrr::ChartParams params{n, p, 1.0};
      gammas.push_back(mcvrr::gamma_hat(sg, params));
      times.push_back(sg.t);
    }
  }

  json reports = json::array();
  bool all_signaled = true;
  const bool multiple = a.rule_texts.size() > 1;
  for (size_t k = 0; k < a.rule_texts.size(); ++k) {
    const mcvrr::RunRule rule = parse_rule(a.rule_texts[k], side);
    const mcvrr::SignalReport rep = mcvrr::run_signal(gammas, rule, a.limits[k]);
    if (!rep.signal_at) all_signaled = false;
    json j{{"gamma_hats", rep.gamma_hats},
           {"flagged", rep.flagged},
           {"signal_at", rep.signal_at ? json(*rep.signal_at) : json(nullptr)},
           {"rule", mcvrr::to_string(rule)},
           {"limit", rep.limit},
           {"side", mcvrr::to_string(side)}};
    reports.push_back(j);

    if (!a.plot_csv.empty()) {
      const std::string path = plot_path_for(a.plot_csv, rule, multiple);
      std::ofstream plot(path, std::ios::binary);
      if (!plot)
        throw mcvrr::argument_error("--plot-csv: cannot open '" + path + "'");
      plot << "t,gamma_hat,limit,flagged\n";
      std::vector<char> flag_mask(gammas.size(), 0);
      for (long idx : rep.flagged) flag_mask[static_cast<size_t>(idx - 1)] = 1;
      for (size_t i = 0; i < gammas.size(); ++i)
        plot << times[i] << ',' << fmt("%.6g", gammas[i]) << ','
             << fmt("%.6g", rep.limit) << ',' << int(flag_mask[i]) << "\n";
    }
  }

  const json output = multiple ? reports : reports.front();
  if (a.json_out.empty()) {
    std::cout << output.dump(2) << "\n";
  } else {
    std::ofstream file(a.json_out, std::ios::binary);
    if (!file)
      throw mcvrr::argument_error("--json-out: cannot open '" + a.json_out + "'");
    file << output.dump(2) << "\n";
  }
  return a.expect_signal && !all_signaled ? exit_expectation : exit_ok;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string rule_text;
  double p_in = 0;
  std::uint64_t reps = 100000, seed = 12345;
  std::uint64_t cap = 100000000;
  bool stepwise = false, serial = false;
};

int run_simulate(const SimulateArgs& a) {
  mcvrr::SimConfig config;
  config.rule = parse_rule(a.rule_text, mcvrr::Side::upper);
  config.p_in = a.p_in;
  config.replications = a.reps;
  config.seed = a.seed;
  config.cap = a.cap;
  mcvrr::McMoments mc = mcvrr::mc_moments(
      config, a.serial ? mcvrr::Exec::serial : mcvrr::Exec::parallel,
      a.stepwise ? mcvrr::Sampler::stepwise : mcvrr::Sampler::gaps);
  mcvrr::RuleChain chain =
      mcvrr::build_chain(config.rule, mcvrr::InControlProb{config.p_in});
  mcvrr::RunLengthMoments exact = mcvrr::run_length_moments(chain);
  std::cout << "arl_hat=" << fmt("%.10g", mc.arl) << " sdrl_hat="
            << fmt("%.10g", mc.sdrl) << " se_arl=" << fmt("%.4g", mc.se_arl)
            << " se_sdrl=" << fmt("%.4g", mc.se_sdrl) << " capped=" << mc.capped
            << "\n";
  std::cout << "arl_markov=" << fmt("%.10g", exact.arl)
            << " sdrl_markov=" << fmt("%.10g", exact.sdrl)
            << " z_arl=" << fmt("%.3f", (mc.arl - exact.arl) / mc.se_arl) << "\n";
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "One-sided r-of-s run-rules control charts for the multivariate "
      "coefficient of variation: design, run-length analysis, table "
      "reproduction, Monte Carlo checks, and Phase II monitoring."};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 2 argument/usage error, 3 numerical failure,\n"
      "4 expectation not met (monitor --expect-signal without a signal).\n"
      "OMP_NUM_THREADS bounds the thread count of parallel subcommands.");

  DesignArgs design_args;
  auto* design = app.add_subcommand("design", "Solve control limits for a chart");
  design->add_option("--n", design_args.n, "Subgroup size")->required();
  design->add_option("--p", design_args.p_dim, "Number of variables")->required();
  design->add_option("--gamma0", design_args.gamma0, "In-control MCV")->required();
  design->add_option("--rule", design_args.rule_text, "Run rule r/s, e.g. 2/3")
      ->required();
  design->add_option("--side", design_args.side_text, "lower or upper");
  design->add_option("--arl0", design_args.arl0, "Target in-control ARL")->capture_default_str();
  design->add_flag("--both-sides", design_args.both_sides,
                   "Print the lower and upper one-sided limits");
  design->add_flag("--table-rounding", design_args.round3,
                   "Round printed limits to 3 decimals (reference-table style)");

  PerfArgs perf_args;
  auto* perf = app.add_subcommand("perf", "Out-of-control ARL/SDRL at given shifts");
  perf->add_option("--n", perf_args.n, "Subgroup size")->required();
  perf->add_option("--p", perf_args.p_dim, "Number of variables")->required();
  perf->add_option("--gamma0", perf_args.gamma0, "In-control MCV")->required();
  perf->add_option("--rule", perf_args.rule_text, "Run rule r/s")->required();
  perf->add_option("--side", perf_args.side_text, "lower or upper")->capture_default_str();
  perf->add_option("--arl0", perf_args.arl0, "Target in-control ARL")->capture_default_str();
  perf->add_option("--tau", perf_args.taus, "Shift size (repeatable)")->required();
  perf->add_option("--format", perf_args.format, "csv or json")->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  perf->add_option("--out", perf_args.out_path, "Write the report here");

  EarlArgs earl_args;
  auto* earl = app.add_subcommand("earl", "Expected ARL over a shift range");
  earl->add_option("--n", earl_args.n, "Subgroup size")->required();
  earl->add_option("--p", earl_args.p_dim, "Number of variables")->required();
  earl->add_option("--gamma0", earl_args.gamma0, "In-control MCV")->required();
  earl->add_option("--rule", earl_args.rule_text, "Run rule r/s")->required();
  earl->add_option("--side", earl_args.side_text, "lower or upper")->capture_default_str();
  earl->add_option("--arl0", earl_args.arl0, "Target in-control ARL")->capture_default_str();
  earl->add_option("--range", earl_args.range_text,
                   "Shift range a,b (default [0.5,1) lower / (1,2] upper)");
  earl->add_option("--step", earl_args.step, "Shift lattice step")->capture_default_str();
  earl->add_flag("--integral", earl_args.integral,
                 "Integrate over the range instead of averaging the lattice");
  earl->add_option("--nodes", earl_args.nodes, "Quadrature nodes for --integral")->capture_default_str();
  earl->add_option("--format", earl_args.format, "csv or json")->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  earl->add_option("--out", earl_args.out_path, "Write the report here");

  TablesArgs tables_args;
  auto* tables = app.add_subcommand("tables", "Reproduce the reference grids");
  tables->add_option("--table", tables_args.table, "Grid number 1..7")
      ->required()
      ->check(CLI::Range(1, 7));
  tables->add_option("--subset", tables_args.subset_text,
                     "Filter, e.g. \"p=2,gamma0=0.1,rule=2/3\"");
  tables->add_option("--out", tables_args.out_path, "Write CSV here (default stdout)");
  tables->add_flag("--serial", tables_args.serial, "Disable cell-level parallelism");

  MonitorArgs monitor_args;
  auto* monitor = app.add_subcommand("monitor", "Scan Phase II data for signals");
  monitor->add_option("--input", monitor_args.input, "Subgroup CSV")->required();
  monitor->add_option("--gamma-col", monitor_args.gamma_col,
                      "Read precomputed MCV values from this column");
  monitor->add_option("--rule", monitor_args.rule_texts, "Run rule r/s (repeatable)")
      ->required();
  monitor->add_option("--limit", monitor_args.limits,
                      "Control limit, one per --rule")
      ->required();
  monitor->add_option("--side", monitor_args.side_text, "lower or upper")->capture_default_str();
  monitor->add_flag("--expect-signal", monitor_args.expect_signal,
                    "Exit 4 unless every rule signals");
  monitor->add_option("--json-out", monitor_args.json_out,
                      "Write the JSON report here (default stdout)");
  monitor->add_option("--plot-csv", monitor_args.plot_csv,
                      "Write t,gamma_hat,limit,flagged rows here");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run-length check");
  simulate->add_option("--rule", sim_args.rule_text, "Run rule r/s")->required();
  simulate->add_option("--p-in", sim_args.p_in, "In-control probability per point")
      ->required();
  simulate->add_option("--reps", sim_args.reps, "Replications")->capture_default_str();
  simulate->add_option("--seed", sim_args.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--cap", sim_args.cap, "Run-length cap")->capture_default_str();
  simulate->add_flag("--stepwise", sim_args.stepwise,
                     "Sample point by point instead of flag gaps");
  simulate->add_flag("--serial", sim_args.serial, "Disable parallel replications");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_args;
  }

  try {
    if (design->parsed()) return run_design(design_args);
    if (perf->parsed()) return run_perf(perf_args);
    if (earl->parsed()) return run_earl(earl_args);
    if (tables->parsed()) return run_tables(tables_args);
    if (monitor->parsed()) return run_monitor(monitor_args);
    if (simulate->parsed()) return run_simulate(sim_args);
  } catch (const mcvrr::argument_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_args;
  } catch (const mcvrr::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_args;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numeric;
  }
  return exit_ok;
}
