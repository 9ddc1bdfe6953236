#pragma once

#include <stdexcept>
#include <string>

namespace mcvrr {

// Invalid argument to a library operation (bad domain, bad configuration).
// The CLI maps this family to exit code 2.
struct argument_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A requested design target that no chart of the given rule can achieve
// (e.g. a target in-control ARL at or below the earliest possible signal).
struct infeasible_error : argument_error {
  using argument_error::argument_error;
};

// Numerical failure (solver non-convergence, singular system). Messages carry
// the last bracket or pivot so the caller can diagnose. CLI exit code 3.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Data that is structurally valid but numerically unusable (singular or
// non-positive-definite covariance).
struct degenerate_data_error : numerical_error {
  using numerical_error::numerical_error;
};

// Malformed input file; carries the 1-based physical line number.
struct parse_error : std::runtime_error {
  long line;
  parse_error(long line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_),
        line(line_) {}
};

}  // namespace mcvrr
