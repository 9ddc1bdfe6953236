#include "mcvrr/linalg.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "mcvrr/errors.hpp"

namespace mcvrr {

SquareMatrix identity(int n) {
  SquareMatrix m(n);
  for (int i = 0; i < n; i++) m.at(i, i) = 1.0;
  return m;
}

SquareMatrix matmul(const SquareMatrix& x, const SquareMatrix& y) {
  SquareMatrix r(x.n);
  for (int i = 0; i < x.n; i++)
    for (int k = 0; k < x.n; k++) {
      const double xik = x.at(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < x.n; j++) r.at(i, j) += xik * y.at(k, j);
    }
  return r;
}

namespace {

// LU factorization with partial pivoting; multipliers stored below the
// diagonal, row swap of step col recorded in piv[col].
struct LuFactors {
  SquareMatrix lu;
  std::vector<int> piv;
};

LuFactors lu_decompose(SquareMatrix a) {
  const int n = a.n;
  std::vector<int> piv(static_cast<size_t>(n));
  for (int col = 0; col < n; col++) {
    int p = col;
    double best = std::fabs(a.at(col, col));
    for (int i = col + 1; i < n; i++) {
      const double v = std::fabs(a.at(i, col));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < 1e-300)
      throw numerical_error("solve_gepp: singular system (pivot " + std::to_string(best) +
                            " at column " + std::to_string(col) + ")");
    piv[static_cast<size_t>(col)] = p;
    if (p != col)
      for (int j = 0; j < n; j++) std::swap(a.at(p, j), a.at(col, j));
    const double inv = 1.0 / a.at(col, col);
    for (int i = col + 1; i < n; i++) {
      const double f = a.at(i, col) * inv;
      a.at(i, col) = f;
      if (f == 0.0) continue;
      for (int j = col + 1; j < n; j++) a.at(i, j) -= f * a.at(col, j);
    }
  }
  return {std::move(a), std::move(piv)};
}

std::vector<double> lu_solve(const LuFactors& f, std::vector<double> b) {
  const int n = f.lu.n;
  for (int col = 0; col < n; col++) std::swap(b[static_cast<size_t>(f.piv[static_cast<size_t>(col)])], b[static_cast<size_t>(col)]);
  for (int i = 1; i < n; i++) {
    double s = b[static_cast<size_t>(i)];
    for (int j = 0; j < i; j++) s -= f.lu.at(i, j) * b[static_cast<size_t>(j)];
    b[static_cast<size_t>(i)] = s;
  }
  for (int i = n - 1; i >= 0; i--) {
    double s = b[static_cast<size_t>(i)];
    for (int j = i + 1; j < n; j++) s -= f.lu.at(i, j) * b[static_cast<size_t>(j)];
    b[static_cast<size_t>(i)] = s / f.lu.at(i, i);
  }
  return b;
}

}  // namespace

std::vector<double> solve_gepp(SquareMatrix a, std::vector<double> b) {
  const int n = a.n;
  if (static_cast<int>(b.size()) != n)
    throw argument_error("solve_gepp: dimension mismatch");
  const LuFactors f = lu_decompose(a);
  std::vector<double> x = lu_solve(f, b);
  // Iterative refinement with an extended-precision residual. The absorbing
  // chains here put kappa(I-Q) near the ARL itself, so the raw solve loses
  // digits exactly where run lengths are long; two passes restore them.
  std::vector<double> r(static_cast<size_t>(n));
  for (int pass = 0; pass < 2; pass++) {
    for (int i = 0; i < n; i++) {
      long double s = b[static_cast<size_t>(i)];
      for (int j = 0; j < n; j++)
        s -= static_cast<long double>(a.at(i, j)) * static_cast<long double>(x[static_cast<size_t>(j)]);
      r[static_cast<size_t>(i)] = static_cast<double>(s);
    }
    const std::vector<double> d = lu_solve(f, r);
    double dmax = 0.0, xmax = 0.0;
    for (int i = 0; i < n; i++) {
      x[static_cast<size_t>(i)] += d[static_cast<size_t>(i)];
      dmax = std::max(dmax, std::fabs(d[static_cast<size_t>(i)]));
      xmax = std::max(xmax, std::fabs(x[static_cast<size_t>(i)]));
    }
    if (dmax <= 1e-16 * xmax) break;
  }
  return x;
}

}  // namespace mcvrr
