#include "mcvrr/monitor.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mcvrr/csv.hpp"
#include "mcvrr/errors.hpp"
#include "mcvrr/linalg.hpp"

namespace mcvrr {

static double gamma_from_stats(const std::vector<double>& mean,
                               const std::vector<double>& cov, int p) {
  SquareMatrix s(p);
  s.a = cov;
  std::vector<double> z;
  try {
    z = solve_gepp(s, mean);
  } catch (const numerical_error&) {
    throw degenerate_data_error("subgroup covariance matrix is singular");
  }
  double v = 0.0;
  for (int i = 0; i < p; ++i) v += mean[static_cast<size_t>(i)] * z[static_cast<size_t>(i)];
  if (!std::isfinite(v) || v <= 0.0)
    throw degenerate_data_error("nonpositive quadratic form xbar' S^-1 xbar");
  return 1.0 / std::sqrt(v);
}

double gamma_hat(const PhaseIISubgroup& subgroup, const ChartParams& params) {
  validate(params);
  const size_t p = static_cast<size_t>(params.p_dim);
  if (subgroup.is_raw()) {
    const size_t n = subgroup.obs.size();
    if (n != static_cast<size_t>(params.n))
      throw argument_error("gamma_hat: subgroup has " + std::to_string(n) +
                           " observations, chart expects " + std::to_string(params.n));
    for (const auto& row : subgroup.obs)
      if (row.size() != p)
        throw argument_error("gamma_hat: observation dimension mismatch");
    std::vector<double> mean(p, 0.0);
    for (const auto& row : subgroup.obs)
      for (size_t j = 0; j < p; ++j) mean[j] += row[j];
    for (size_t j = 0; j < p; ++j) mean[j] /= static_cast<double>(n);
    std::vector<double> cov(p * p, 0.0);
    for (const auto& row : subgroup.obs)
      for (size_t i = 0; i < p; ++i)
        for (size_t j = 0; j < p; ++j)
          cov[i * p + j] += (row[i] - mean[i]) * (row[j] - mean[j]);
    for (double& c : cov) c /= static_cast<double>(n - 1);
    return gamma_from_stats(mean, cov, params.p_dim);
  }
  if (subgroup.mean.size() != p || subgroup.cov.size() != p * p)
    throw argument_error("gamma_hat: summary statistics do not match p_dim");
  return gamma_from_stats(subgroup.mean, subgroup.cov, params.p_dim);
}

SignalReport run_signal(const std::vector<double>& gamma_hats, const RunRule& rule,
                        double limit) {
  validate(rule);
  if (!std::isfinite(limit) || limit <= 0.0)
    throw argument_error("run_signal: limit must be finite and positive");
  SignalReport rep;
  rep.rule = rule;
  rep.limit = limit;
  rep.gamma_hats = gamma_hats;
  RuleScanner scan(rule.r, rule.s);
  for (size_t i = 0; i < gamma_hats.size(); ++i) {
    const double g = gamma_hats[i];
    if (!std::isfinite(g) || g <= 0.0)
      throw argument_error("run_signal: gamma_hat[" + std::to_string(i + 1) +
                           "] must be finite and positive");
    const bool flag = rule.side == Side::upper ? g > limit : g < limit;
    if (flag) rep.flagged.push_back(static_cast<long>(i) + 1);
    if (scan.push(flag) && !rep.signal_at) rep.signal_at = static_cast<long>(i) + 1;
  }
  return rep;
}

SignalReport run_signal(const std::vector<double>& gamma_hats, RunRule rule,
                        double limit, Side side) {
  rule.side = side;
  return run_signal(gamma_hats, rule, limit);
}

// ---- CSV ingestion --------------------------------------------------------

namespace {

long integer_cell(double v, long line, const char* what) {
  if (!std::isfinite(v) || v != std::floor(v))
    throw parse_error(line, std::string(what) + " must be an integer");
  return static_cast<long>(v);
}

std::vector<PhaseIISubgroup> ingest_summary(const CsvTable& table) {
  size_t p = 0;
  while (1 + p < table.header.size() && table.header[1 + p].rfind("mean_", 0) == 0) ++p;
  if (p == 0) throw parse_error(1, "summary form needs mean_1..mean_p columns");
  std::vector<std::string> want{"t"};
  for (size_t j = 1; j <= p; ++j) want.push_back("mean_" + std::to_string(j));
  for (size_t i = 1; i <= p; ++i)
    for (size_t j = i; j <= p; ++j)
      want.push_back("cov_" + std::to_string(i) + std::to_string(j));
  if (table.header != want) {
    for (size_t k = 0; k < want.size(); ++k)
      if (k >= table.header.size() || table.header[k] != want[k])
        throw parse_error(1, "expected column '" + want[k] + "'" +
                                 (k < table.header.size()
                                      ? ", got '" + table.header[k] + "'"
                                      : ", header ends early"));
    throw parse_error(1, "trailing columns after the covariance triangle");
  }

  std::vector<PhaseIISubgroup> out;
  long prev_t = 0;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const std::vector<double>& row = table.rows[r];
    const long line = table.line_numbers[r];
    PhaseIISubgroup sg;
    sg.t = integer_cell(row[0], line, "t");
    if (!out.empty() && sg.t <= prev_t)
      throw parse_error(line, "t must be strictly increasing");
    prev_t = sg.t;
    sg.mean.assign(row.begin() + 1, row.begin() + 1 + static_cast<long>(p));
    sg.cov.assign(p * p, 0.0);
    size_t idx = 1 + p;
    for (size_t i = 0; i < p; ++i)
      for (size_t j = i; j < p; ++j) {
        sg.cov[i * p + j] = row[idx];
        sg.cov[j * p + i] = row[idx];
        ++idx;
      }
    out.push_back(std::move(sg));
  }
  return out;
}

std::vector<PhaseIISubgroup> ingest_raw(const CsvTable& table) {
  const size_t p = table.header.size() - 2;
  if (p == 0) throw parse_error(1, "raw form needs x_1..x_p columns");
  std::vector<std::string> want{"t", "obs"};
  for (size_t j = 1; j <= p; ++j) want.push_back("x_" + std::to_string(j));
  if (table.header != want)
    throw parse_error(1, "raw header must be t,obs,x_1..x_p");

  std::vector<PhaseIISubgroup> out;
  size_t group_n = 0;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const std::vector<double>& row = table.rows[r];
    const long line = table.line_numbers[r];
    const long t = integer_cell(row[0], line, "t");
    const long obs = integer_cell(row[1], line, "obs");
    if (out.empty() || out.back().t != t) {
      if (!out.empty()) {
        if (t <= out.back().t) throw parse_error(line, "t must be nondecreasing, grouped");
        if (group_n == 0)
          group_n = out.back().obs.size();
        else if (out.back().obs.size() != group_n)
          throw parse_error(line, "subgroup sizes differ (" +
                                      std::to_string(out.back().obs.size()) + " vs " +
                                      std::to_string(group_n) + ")");
      }
      PhaseIISubgroup sg;
      sg.t = t;
      out.push_back(std::move(sg));
    }
    if (obs != static_cast<long>(out.back().obs.size()) + 1)
      throw parse_error(line, "obs must run 1..n within each subgroup");
    out.back().obs.emplace_back(row.begin() + 2, row.end());
  }
  if (!out.empty() && group_n != 0 && out.back().obs.size() != group_n)
    throw parse_error(table.line_numbers.back(), "last subgroup is short");
  return out;
}

}  // namespace

std::vector<PhaseIISubgroup> ingest(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  if (content.find_first_not_of(" \t\r\n") == std::string::npos) return {};
  std::istringstream stream(content);
  CsvTable table = read_csv(stream);
  if (table.header.empty() || table.header[0] != "t")
    throw parse_error(1, "monitor input must start with a 't' column");
  if (table.header.size() >= 2 && table.header[1] == "obs") return ingest_raw(table);
  return ingest_summary(table);
}

std::vector<PhaseIISubgroup> ingest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(0, "cannot open '" + path + "'");
  return ingest(in);
}

}  // namespace mcvrr
