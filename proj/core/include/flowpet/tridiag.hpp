#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace flowpet {

/// Thomas solve of a tridiagonal system. x holds the right-hand side on
/// entry and the solution on exit; scratch must have the same length.
/// No pivoting: the transport systems assembled here are column
/// diagonally dominant M-matrices, their transposes row dominant.
inline void solve_tridiag(std::span<const double> lower, std::span<const double> diag,
                          std::span<const double> upper, std::span<double> x,
                          std::span<double> scratch) {
  const size_t n = diag.size();
  double piv = diag[0];
  if (piv == 0.0) throw std::runtime_error("solve_tridiag: zero pivot");
  x[0] /= piv;
  for (size_t k = 1; k < n; ++k) {
    scratch[k] = upper[k - 1] / piv;
    piv = diag[k] - lower[k] * scratch[k];
    if (piv == 0.0) throw std::runtime_error("solve_tridiag: zero pivot");
    x[k] = (x[k] - lower[k] * x[k - 1]) / piv;
  }
  for (size_t k = n - 1; k-- > 0;) x[k] -= scratch[k + 1] * x[k + 1];
}

/// Solves the transposed system A^T x = b for the same band layout:
/// (A^T)(k,k-1) = upper[k-1], (A^T)(k,k+1) = lower[k+1].
inline void solve_tridiag_transposed(std::span<const double> lower,
                                     std::span<const double> diag,
                                     std::span<const double> upper, std::span<double> x,
                                     std::span<double> lower_t, std::span<double> upper_t,
                                     std::span<double> scratch) {
  const size_t n = diag.size();
  lower_t[0] = 0.0;
  upper_t[n - 1] = 0.0;
  for (size_t k = 1; k < n; ++k) lower_t[k] = upper[k - 1];
  for (size_t k = 0; k + 1 < n; ++k) upper_t[k] = lower[k + 1];
  solve_tridiag(lower_t, diag, upper_t, x, scratch);
}

}  // namespace flowpet
