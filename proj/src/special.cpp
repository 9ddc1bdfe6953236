#include "mcvrr/special.hpp"

#include <cmath>
#include <string>

#include "mcvrr/errors.hpp"

namespace mcvrr {

// Modified Lentz continued fraction for the incomplete beta function.
// Converges quickly when x < (a+1)/(a+b+2); the caller guarantees that.
static double beta_cf(double a, double b, double x) {
  const double eps = 1e-15;
  const double fpmin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 1000; m++) {
    const double m2 = 2.0 * m;
    // even step
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    // odd step
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw numerical_error("incomplete beta continued fraction did not converge (a=" +
                        std::to_string(a) + ", b=" + std::to_string(b) +
                        ", x=" + std::to_string(x) + ")");
}

double reg_inc_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw argument_error("reg_inc_beta: a and b must be positive and finite");
  if (!(x >= 0.0) || !(x <= 1.0))
    throw argument_error("reg_inc_beta: x must lie in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  // log of x^a (1-x)^b / (a B(a,b)) up to the 1/a resp. 1/b factor below
  const double lnbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(lnbt);
  double r;
  if (x < (a + 1.0) / (a + b + 2.0))
    r = bt * beta_cf(a, b, x) / a;
  else
    r = 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
  if (r < 0.0) r = 0.0;
  if (r > 1.0) r = 1.0;
  return r;
}

}  // namespace mcvrr
