#include "mcvrr/rulechain.hpp"

#include <bit>
#include <cmath>

#include "mcvrr/errors.hpp"

namespace mcvrr {

const char* to_string(Side side) { return side == Side::lower ? "lower" : "upper"; }

Side side_from_string(const std::string& s) {
  if (s == "lower") return Side::lower;
  if (s == "upper") return Side::upper;
  throw argument_error("side must be 'lower' or 'upper', got '" + s + "'");
}

void validate(const RunRule& rule) {
  if (rule.r < 1 || rule.s < rule.r || rule.s > 8)
    throw argument_error("RunRule: need 1 <= r <= s <= 8, got r=" + std::to_string(rule.r) +
                         " s=" + std::to_string(rule.s));
}

std::string to_string(const RunRule& rule) {
  return std::to_string(rule.r) + "/" + std::to_string(rule.s);
}

InControlProb p_in_of_limit(const ChartParams& params, Side side, double limit, double tau) {
  if (!(limit > 0.0)) throw argument_error("p_in_of_limit: limit must be positive");
  const double delta1 = delta_of(params, tau).delta1;
  const double cdf = mcv_cdf(limit, params, delta1);
  return InControlProb{side == Side::lower ? 1.0 - cdf : cdf};
}

RuleChain build_chain(const RunRule& rule, InControlProb p) {
  validate(rule);
  const double pin = p.p_in;
  if (!(pin >= 1e-12) || !(pin <= 1.0 - 1e-12))
    throw argument_error("build_chain: p_in must lie in [1e-12, 1-1e-12], got " +
                         std::to_string(pin));

  const int hist_bits = rule.s - 1;
  const unsigned nhist = 1u << hist_bits;
  // transient states: histories with at most r-1 flags, in integer
  // (= lexicographic, oldest outcome as the most significant bit) order
  std::vector<int> index(nhist, -1);
  std::vector<unsigned> states;
  for (unsigned h = 0; h < nhist; h++)
    if (std::popcount(h) <= rule.r - 1) {
      index[h] = static_cast<int>(states.size());
      states.push_back(h);
    }
  const int m = static_cast<int>(states.size());

  RuleChain chain;
  chain.q = SquareMatrix(m);
  chain.init.assign(m, 0.0);
  chain.state_labels.resize(m);
  const unsigned mask = nhist - 1;
  for (int i = 0; i < m; i++) {
    const unsigned h = states[i];
    std::string label(hist_bits, '0');
    for (int bit = 0; bit < hist_bits; bit++)
      if (h & (1u << (hist_bits - 1 - bit))) label[bit] = '1';
    chain.state_labels[i] = label;
    for (int o = 0; o <= 1; o++) {
      if (std::popcount(h) + o >= rule.r) continue;  // the s-window h||o absorbs
      const unsigned next = ((h << 1) | static_cast<unsigned>(o)) & mask;
      chain.q.at(i, index[next]) += (o == 0) ? pin : 1.0 - pin;
    }
  }
  chain.init_index = index[0];  // all-conforming history
  chain.init[chain.init_index] = 1.0;
  return chain;
}

RunLengthMoments run_length_moments(const RuleChain& chain) {
  const int m = chain.q.n;
  SquareMatrix a(m);  // I - Q
  for (int i = 0; i < m; i++)
    for (int j = 0; j < m; j++) a.at(i, j) = (i == j ? 1.0 : 0.0) - chain.q.at(i, j);

  // nu1 = init' (I-Q)^-1 1 ; nu2 = 2 init' (I-Q)^-2 Q 1. With u = (I-Q)^-1 1,
  // (I-Q)^-1 Q 1 = u - 1, so the second solve is (I-Q) w = u - 1.
  const std::vector<double> ones(m, 1.0);
  const std::vector<double> u = solve_gepp(a, ones);
  std::vector<double> rhs(m);
  for (int i = 0; i < m; i++) rhs[i] = u[i] - 1.0;
  const std::vector<double> w = solve_gepp(a, rhs);

  RunLengthMoments out;
  double nu1 = 0.0, nu2 = 0.0;
  for (int i = 0; i < m; i++) {
    nu1 += chain.init[i] * u[i];
    nu2 += 2.0 * chain.init[i] * w[i];
  }
  out.nu1 = nu1;
  out.nu2 = nu2;
  out.mu2 = nu2 - nu1 * nu1 + nu1;
  out.arl = nu1;
  out.sdrl = std::sqrt(out.mu2 > 0.0 ? out.mu2 : 0.0);
  return out;
}

double run_length_survival(const RuleChain& chain, std::uint64_t t) {
  const int m = chain.q.n;
  SquareMatrix pw = identity(m);
  SquareMatrix base = chain.q;
  std::uint64_t e = t;
  while (e > 0) {
    if (e & 1u) pw = matmul(pw, base);
    e >>= 1;
    if (e > 0) base = matmul(base, base);
  }
  double out = 0.0;
  for (int i = 0; i < m; i++) {
    double row = 0.0;
    for (int j = 0; j < m; j++) row += pw.at(i, j);
    out += chain.init[i] * row;
  }
  if (out < 0.0) out = 0.0;
  if (out > 1.0) out = 1.0;
  return out;
}

RuleScanner::RuleScanner(int r, int s) : r_(r), s_(s) {
  validate(RunRule{r, s, Side::upper});
}

bool RuleScanner::push(bool flag) {
  if (t_ >= static_cast<std::uint64_t>(s_))
    count_ -= static_cast<int>((window_ >> (s_ - 1)) & 1u);
  window_ = ((window_ << 1) | (flag ? 1u : 0u)) & ((1u << s_) - 1u);
  count_ += flag ? 1 : 0;
  t_++;
  return count_ >= r_;
}

}  // namespace mcvrr
