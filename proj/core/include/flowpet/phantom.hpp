#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowpet/boundary.hpp"
#include "flowpet/regularizer.hpp"

namespace flowpet {

struct PhantomOptions {
  double strip_fraction = 0.1;      // edge_defect: strip width / domain extent
  double block_fraction = 0.2;      // inner_defect: block extent / domain extent
  Edge defect_edge = Edge::Bottom;  // edge the strip hugs (the inflow edge)
};

/// Parameter presets. "constant" fills the reference values everywhere
/// (k1 = 0.9, k2 = 0.75, k3 = 0.9 1/s; vA = vV = (1e-4, 700) cm/s,
/// vT = (-50, 1e-4) cm/s; dA = dV = 3e-7, dT = 3e-6 cm^2/s).
/// "edge_defect" zeroes k1 and k2 in a thin strip along the inflow edge,
/// "inner_defect" in a centered block. Throws on unknown preset names.
ParameterSet phantom(const std::string& preset, const Grid& g,
                     const PhantomOptions& opt = {});

/// 1 inside the preset's defect region, 0 elsewhere ("constant": all 0).
std::vector<std::uint8_t> phantom_defect_mask(const std::string& preset, const Grid& g,
                                              const PhantomOptions& opt = {});

/// Reference regularization preset: constant prior fields (k = 0.89, 0.7,
/// 0.85; velocity magnitudes 0.1/15/-5; d = 1e-3..1e-2) with per-block
/// a-priori and gradient weights.
RegularizerConfig reference_regularizer(const Grid& g);

/// Prior value / weight triplets of the reference preset, indexed by block.
struct ReferenceRegEntry {
  double prior;
  double alpha;
  double xi;
};
ReferenceRegEntry reference_reg_entry(ParamBlock b);

}  // namespace flowpet
