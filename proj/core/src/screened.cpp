#include "flowpet/screened.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "flowpet/tridiag.hpp"

namespace flowpet {

namespace {

// one-directional parts of the Neumann Laplacian
void lap_x(const ScalarField& q, ScalarField& out) {
  const Grid& g = q.grid();
  const double ih2 = 1.0 / (g.hx * g.hx);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double acc = 0.0;
      if (i + 1 < g.nx) acc += (q.at(i + 1, j) - q.at(i, j)) * ih2;
      if (i > 0) acc -= (q.at(i, j) - q.at(i - 1, j)) * ih2;
      out.at(i, j) = acc;
    }
}

void lap_y(const ScalarField& q, ScalarField& out) {
  const Grid& g = q.grid();
  const double ih2 = 1.0 / (g.hy * g.hy);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double acc = 0.0;
      if (j + 1 < g.ny) acc += (q.at(i, j + 1) - q.at(i, j)) * ih2;
      if (j > 0) acc -= (q.at(i, j) - q.at(i, j - 1)) * ih2;
      out.at(i, j) = acc;
    }
}

// solve (shift*I - zeta*lap_x) q = rhs, tridiagonal per row
void solve_x(double shift, double zeta, const ScalarField& rhs, ScalarField& q) {
  const Grid& g = rhs.grid();
  const double w = zeta / (g.hx * g.hx);
  const size_t n = static_cast<size_t>(g.nx);
  std::vector<double> lower(n), diag(n), upper(n), x(n), scratch(n);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int nb = (i > 0 ? 1 : 0) + (i + 1 < g.nx ? 1 : 0);
      diag[static_cast<size_t>(i)] = shift + w * nb;
      lower[static_cast<size_t>(i)] = i > 0 ? -w : 0.0;
      upper[static_cast<size_t>(i)] = i + 1 < g.nx ? -w : 0.0;
      x[static_cast<size_t>(i)] = rhs.at(i, j);
    }
    solve_tridiag(lower, diag, upper, x, scratch);
    for (int i = 0; i < g.nx; ++i) q.at(i, j) = x[static_cast<size_t>(i)];
  }
}

void solve_y(double shift, double zeta, const ScalarField& rhs, ScalarField& q) {
  const Grid& g = rhs.grid();
  const double w = zeta / (g.hy * g.hy);
  const size_t n = static_cast<size_t>(g.ny);
  std::vector<double> lower(n), diag(n), upper(n), x(n), scratch(n);
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.ny; ++j) {
      const int nb = (j > 0 ? 1 : 0) + (j + 1 < g.ny ? 1 : 0);
      diag[static_cast<size_t>(j)] = shift + w * nb;
      lower[static_cast<size_t>(j)] = j > 0 ? -w : 0.0;
      upper[static_cast<size_t>(j)] = j + 1 < g.ny ? -w : 0.0;
      x[static_cast<size_t>(j)] = rhs.at(i, j);
    }
    solve_tridiag(lower, diag, upper, x, scratch);
    for (int j = 0; j < g.ny; ++j) q.at(i, j) = x[static_cast<size_t>(j)];
  }
}

double norm2(const ScalarField& f) {
  double acc = 0.0;
  for (double x : f.values()) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

ScalarField screened_poisson_solve(const ScalarField& rhs, double c, double zeta,
                                   const ScreenedSolveOptions& opt,
                                   ScreenedSolveInfo* info) {
  if (!(c > 0.0)) throw std::invalid_argument("screened_poisson_solve: c must be > 0");
  if (!(zeta >= 0.0)) throw std::invalid_argument("screened_poisson_solve: zeta must be >= 0");
  const Grid& g = rhs.grid();
  ScalarField q(g);
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    if (info) *info = {0, 0.0};
    return q;
  }
  if (zeta == 0.0) {
    q = rhs;
    q *= 1.0 / c;
    if (info) *info = {0, 0.0};
    return q;
  }

  // Wachspress cycle over the spectrum [c/2, c/2 + 4*zeta/h^2] of the
  // half-operators; H and V commute on the rectangle, so the cycle
  // contracts every error mode.
  const double hmin2 = std::min(g.hx * g.hx, g.hy * g.hy);
  const double lo = 0.5 * c;
  const double hi = 0.5 * c + 4.0 * zeta / hmin2;
  constexpr int n_params = 8;
  std::vector<double> rho(n_params);
  for (int k = 0; k < n_params; ++k)
    rho[static_cast<size_t>(k)] = hi * std::pow(lo / hi, (2.0 * k + 1.0) / (2.0 * n_params));

  ScalarField lx(g), ly(g), tmp(g), half(g);
  const double ch = 0.5 * c;
  for (int cycle = 0; cycle < opt.max_cycles; ++cycle) {
    const double r = rho[static_cast<size_t>(cycle % n_params)];
    // (H + r) q_half = rhs - (V - r) q
    lap_y(q, ly);
    for (int k = 0; k < tmp.size(); ++k)
      tmp[k] = rhs[k] - ((ch - r) * q[k] - zeta * ly[k]);
    solve_x(ch + r, zeta, tmp, half);
    // (V + r) q = rhs - (H - r) q_half
    lap_x(half, lx);
    for (int k = 0; k < tmp.size(); ++k)
      tmp[k] = rhs[k] - ((ch - r) * half[k] - zeta * lx[k]);
    solve_y(ch + r, zeta, tmp, q);

    lap_x(q, lx);
    lap_y(q, ly);
    double rnorm = 0.0;
    for (int k = 0; k < q.size(); ++k) {
      const double res = rhs[k] - (c * q[k] - zeta * (lx[k] + ly[k]));
      rnorm += res * res;
    }
    rnorm = std::sqrt(rnorm);
    if (rnorm <= opt.tol * bnorm) {
      if (info) *info = {cycle + 1, rnorm / bnorm};
      return q;
    }
    if (cycle + 1 == opt.max_cycles && info) *info = {cycle + 1, rnorm / bnorm};
  }
  throw std::runtime_error("screened_poisson_solve: ADI iteration did not converge");
}

}  // namespace flowpet
