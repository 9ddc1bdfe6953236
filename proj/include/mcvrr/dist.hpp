#pragma once

namespace mcvrr {

// Process context for an MCV chart: subgroup size n, number of quality
// variables p_dim, in-control multivariate coefficient of variation gamma0.
struct ChartParams {
  int n = 0;
  int p_dim = 0;
  double gamma0 = 0.0;
};

// Degrees of freedom and noncentrality of a noncentral F distribution.
struct NoncentralFParams {
  double d1 = 0.0;
  double d2 = 0.0;
  double lambda = 0.0;
};

// Noncentrality after a multiplicative MCV shift tau: delta1 = n/(tau*gamma0)^2.
struct ShiftedDelta {
  double delta1 = 0.0;
  double tau = 0.0;
};

void validate(const ChartParams& params);
void validate(const NoncentralFParams& params);

// P(F <= x) for F ~ noncentral F(d1, d2, lambda), by the Poisson mixture of
// regularized incomplete beta functions. lambda=0 gives the central F CDF.
double ncf_cdf(double x, const NoncentralFParams& params);

// Inverse of ncf_cdf: x with ncf_cdf(x) = alpha. Bracketing + bisection to
// 1e-12 relative width; throws numerical_error (carrying the last bracket)
// on non-convergence.
double ncf_quantile(double alpha, const NoncentralFParams& params);

// CDF of the sample MCV at gamma-hat = x for subgroups of size n with p_dim
// variables, where delta = n/gamma^2 is the noncentrality of the underlying
// true MCV: 1 - F_F( n(n-p)/((n-1) p x^2) | p, n-p, delta ).
double mcv_cdf(double x, const ChartParams& params, double delta);

// Inverse of mcv_cdf in its first argument.
double mcv_quantile(double alpha, const ChartParams& params, double delta);

// delta1 = n/(tau*gamma0)^2; tau=1 reproduces the in-control noncentrality.
ShiftedDelta delta_of(const ChartParams& params, double tau);

}  // namespace mcvrr
