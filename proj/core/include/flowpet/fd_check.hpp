#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flowpet/parameters.hpp"

namespace flowpet {

using ObjectiveFn = std::function<double(const ParameterSet&)>;

/// (J(p + eps e) - J(p - eps e)) / (2 eps) for the unit direction e of one
/// cell of one block.
double central_difference(const ObjectiveFn& J, const ParameterSet& p, ParamBlock b,
                          int cell, double eps);

struct GradCheckRow {
  ParamBlock block;
  int cell;
  double analytic;
  double fd;       // best finite-difference value over the eps sweep
  double rel_err;  // |analytic - fd| / max(|analytic|, |fd|), min over sweep
};

struct GradCheckReport {
  std::vector<GradCheckRow> rows;
  double max_rel_err = 0.0;
};

/// Compares an analytic gradient against central differences of J on the
/// cells_per_block most significant cells (largest |analytic|) of every
/// block, sweeping the given eps values and keeping the best agreement
/// per cell. Cells with gradients at roundoff scale carry no finite-
/// difference signal, so the sampling targets the cells that do.
GradCheckReport gradient_check(const ObjectiveFn& J, const ParameterSet& p,
                               const ParameterSet& analytic,
                               std::span<const double> eps_sweep, int cells_per_block);

void write_gradcheck_csv(const std::string& path, const GradCheckReport& report);

}  // namespace flowpet
