#include "mcvrr/dist.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "mcvrr/errors.hpp"
#include "mcvrr/special.hpp"

namespace mcvrr {

void validate(const ChartParams& params) {
  if (params.n < 2) throw argument_error("ChartParams: n must be >= 2");
  if (params.p_dim < 1) throw argument_error("ChartParams: p_dim must be >= 1");
  if (params.n <= params.p_dim)
    throw argument_error("ChartParams: n must exceed p_dim (sample covariance would be singular)");
  if (!(params.gamma0 > 0.0) || !std::isfinite(params.gamma0))
    throw argument_error("ChartParams: gamma0 must be positive and finite");
}

void validate(const NoncentralFParams& params) {
  if (!(params.d1 > 0.0) || !std::isfinite(params.d1))
    throw argument_error("NoncentralFParams: d1 must be positive and finite");
  if (!(params.d2 > 0.0) || !std::isfinite(params.d2))
    throw argument_error("NoncentralFParams: d2 must be positive and finite");
  if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda))
    throw argument_error("NoncentralFParams: lambda must be nonnegative and finite");
}

// log of the beta-recurrence term T(a,b,y) = Gamma(a+b)/(Gamma(a+1)Gamma(b))
//   * y^a (1-y)^b, satisfying I_y(a+1,b) = I_y(a,b) - T(a,b,y).
static double log_beta_term(double a, double b, double y) {
  return std::lgamma(a + b) - std::lgamma(a + 1.0) - std::lgamma(b) +
         a * std::log(y) + b * std::log1p(-y);
}

static double clamp01(double v) {
  if (v < 0.0) return 0.0;
  if (v > 1.0) return 1.0;
  return v;
}

double ncf_cdf(double x, const NoncentralFParams& params) {
  validate(params);
  if (!(x >= 0.0) || std::isnan(x))
    throw argument_error("ncf_cdf: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;

  const double d1 = params.d1, d2 = params.d2;
  const double y = d1 * x / (d1 * x + d2);
  if (y >= 1.0) return 1.0;
  const double a0 = 0.5 * d1, b = 0.5 * d2;
  if (params.lambda == 0.0) return reg_inc_beta(y, a0, b);

  // Poisson mixture sum_j w_j(lambda) I_y(a0+j, b), w_j = e^-s s^j / j!,
  // s = lambda/2. Summed outward from the modal index so that the weights
  // never underflow at large lambda; the incomplete betas follow the stable
  // single-term recurrence instead of being recomputed.
  const double s = 0.5 * params.lambda;
  const long jstar = static_cast<long>(std::floor(s));
  const double logws = -s + jstar * std::log(s) - std::lgamma(jstar + 1.0);
  const double wstar = std::exp(logws);
  const double istar = clamp01(reg_inc_beta(y, a0 + jstar, b));

  const long max_terms = 20000;
  const double wtarget = 1.0 - 1e-12;

  double wsum = 0.0, acc = 0.0;
  long terms = 0;

  // upward sweep: j = jstar, jstar+1, ...
  {
    double w = wstar;
    double inc = istar;
    double term = std::exp(log_beta_term(a0 + jstar, b, y));
    long j = jstar;
    while (terms < max_terms) {
      wsum += w;
      acc += w * inc;
      terms++;
      if (wsum >= wtarget) break;
      // advance j -> j+1
      const double a = a0 + j;
      inc = clamp01(inc - term);
      term *= y * (a + b) / (a + 1.0);
      j++;
      w *= s / static_cast<double>(j);
      if (w == 0.0) break;  // weights fully underflowed past the mode
    }
  }
  // downward sweep: j = jstar-1, jstar-2, ..., 0
  if (wsum < wtarget && jstar > 0) {
    double w = wstar;
    double inc = istar;
    // term at a0+jstar-1 for the step I(a-1) = I(a) + T(a-1,b,y)
    double term = std::exp(log_beta_term(a0 + jstar - 1.0, b, y));
    for (long j = jstar - 1; j >= 0 && terms < max_terms; j--) {
      w *= static_cast<double>(j + 1) / s;
      inc = clamp01(inc + term);
      if (j > 0) term *= (a0 + j) / (y * (a0 + j - 1.0 + b));
      wsum += w;
      acc += w * inc;
      terms++;
      if (wsum >= wtarget || w == 0.0) break;
    }
  }
  return clamp01(acc);
}

// Shared bracket-and-bisect inverse for a monotone CDF.
template <class Cdf>
static double invert_cdf(double alpha, double guess, const Cdf& cdf, const char* who) {
  double lo = guess, hi = guess;
  double flo = cdf(lo), fhi = flo;
  int tries = 0;
  while (flo > alpha) {
    hi = lo;
    fhi = flo;
    lo *= 0.5;
    flo = cdf(lo);
    if (++tries > 1200 || lo < 1e-300)
      throw numerical_error(std::string(who) + ": bracket expansion failed, last bracket [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  while (fhi < alpha) {
    lo = hi;
    hi *= 2.0;
    fhi = cdf(hi);
    if (++tries > 1200 || hi > 1e300)
      throw numerical_error(std::string(who) + ": bracket expansion failed, last bracket [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  for (int it = 0; it < 200; it++) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-12 * hi) return mid;
    if (cdf(mid) < alpha)
      lo = mid;
    else
      hi = mid;
  }
  if (hi - lo <= 1e-10 * hi) return 0.5 * (lo + hi);
  throw numerical_error(std::string(who) + ": bisection did not converge, last bracket [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

double ncf_quantile(double alpha, const NoncentralFParams& params) {
  validate(params);
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw argument_error("ncf_quantile: alpha must lie in (0,1)");
  // start near the distribution mean when it exists
  double guess = (params.d2 > 2.0)
                     ? params.d2 * (params.d1 + params.lambda) / (params.d1 * (params.d2 - 2.0))
                     : 1.0 + params.lambda / params.d1;
  if (!(guess > 0.0) || !std::isfinite(guess)) guess = 1.0;
  return invert_cdf(alpha, guess, [&](double x) { return ncf_cdf(x, params); },
                    "ncf_quantile");
}

static double mcv_scale(const ChartParams& params) {
  const double n = params.n, p = params.p_dim;
  return n * (n - p) / ((n - 1.0) * p);
}

double mcv_cdf(double x, const ChartParams& params, double delta) {
  validate(params);
  if (!(x > 0.0)) throw argument_error("mcv_cdf: x must be positive");
  const NoncentralFParams f{static_cast<double>(params.p_dim),
                            static_cast<double>(params.n - params.p_dim), delta};
  return clamp01(1.0 - ncf_cdf(mcv_scale(params) / (x * x), f));
}

double mcv_quantile(double alpha, const ChartParams& params, double delta) {
  validate(params);
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw argument_error("mcv_quantile: alpha must lie in (0,1)");
  const NoncentralFParams f{static_cast<double>(params.p_dim),
                            static_cast<double>(params.n - params.p_dim), delta};
  const double fq = ncf_quantile(1.0 - alpha, f);
  return std::sqrt(mcv_scale(params) / fq);
}

ShiftedDelta delta_of(const ChartParams& params, double tau) {
  validate(params);
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw argument_error("delta_of: tau must be positive and finite");
  const double g1 = tau * params.gamma0;
  return ShiftedDelta{params.n / (g1 * g1), tau};
}

}  // namespace mcvrr
