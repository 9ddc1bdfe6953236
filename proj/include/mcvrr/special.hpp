#pragma once

namespace mcvrr {

// Regularized incomplete beta function I_x(a,b).
// Continued-fraction evaluation with the symmetry split at
// x = (a+1)/(a+b+2), accurate to ~1e-14 relative for a,b up to a few
// thousand. Throws argument_error outside the domain, numerical_error if the
// continued fraction fails to converge.
double reg_inc_beta(double x, double a, double b);

}  // namespace mcvrr
