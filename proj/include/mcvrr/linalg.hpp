#pragma once

#include <vector>

namespace mcvrr {

// Minimal dense square matrix, row-major. The chains here are at most
// 128x128, so plain Gaussian elimination is exact enough and dependency-free.
struct SquareMatrix {
  int n = 0;
  std::vector<double> a;  // n*n, row-major

  SquareMatrix() = default;
  explicit SquareMatrix(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}
  double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

SquareMatrix identity(int n);
SquareMatrix matmul(const SquareMatrix& x, const SquareMatrix& y);

// x solving a x = b by Gaussian elimination with partial pivoting.
// Throws numerical_error on a (numerically) singular system.
std::vector<double> solve_gepp(SquareMatrix a, std::vector<double> b);

}  // namespace mcvrr
