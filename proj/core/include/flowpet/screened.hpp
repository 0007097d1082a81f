#pragma once

#include "flowpet/field.hpp"

namespace flowpet {

struct ScreenedSolveOptions {
  double tol = 1e-13;  // relative residual
  int max_cycles = 2000;
};

struct ScreenedSolveInfo {
  int cycles = 0;
  double rel_residual = 0.0;
};

/// Solves (c*I - zeta*lap_h) q = rhs with the Neumann 5-point Laplacian of
/// the regularizer, c > 0, zeta >= 0, by Peaceman-Rachford ADI: the
/// operator splits into commuting tridiagonal parts per direction, each
/// solved by the Thomas algorithm. Throws if the residual target is not
/// reached within max_cycles.
ScalarField screened_poisson_solve(const ScalarField& rhs, double c, double zeta,
                                   const ScreenedSolveOptions& opt = {},
                                   ScreenedSolveInfo* info = nullptr);

}  // namespace flowpet
