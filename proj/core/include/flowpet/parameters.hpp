#pragma once

#include <array>
#include <span>
#include <string_view>

#include "flowpet/field.hpp"

namespace flowpet {

/// The 12 spatially distributed model parameters of the 2-D problem:
/// exchange rates artery->tissue (k1), tissue->vein (k2), vein->artery (k3),
/// isotropic diffusivities and velocities per compartment.
struct ParameterSet {
  ScalarField k1, k2, k3;  // 1/s
  ScalarField dA, dT, dV;  // cm^2/s
  VectorField vA, vT, vV;  // cm/s

  ParameterSet() = default;
  explicit ParameterSet(const Grid& g)
      : k1(g), k2(g), k3(g), dA(g), dT(g), dV(g), vA(g), vT(g), vV(g) {}

  const Grid& grid() const { return k1.grid(); }
  bool all_finite() const;
};

/// Scalar blocks of a ParameterSet (velocities split per component).
enum class ParamBlock : int {
  K1 = 0, K2, K3, DA, DT, DV, VAx, VAy, VTx, VTy, VVx, VVy,
};

inline constexpr int kNumParamBlocks = 12;

inline constexpr std::array<ParamBlock, kNumParamBlocks> all_param_blocks = {
    ParamBlock::K1,  ParamBlock::K2,  ParamBlock::K3,  ParamBlock::DA,
    ParamBlock::DT,  ParamBlock::DV,  ParamBlock::VAx, ParamBlock::VAy,
    ParamBlock::VTx, ParamBlock::VTy, ParamBlock::VVx, ParamBlock::VVy,
};

std::string_view block_name(ParamBlock b);
ParamBlock block_from_name(std::string_view name);

ScalarField& block_field(ParameterSet& p, ParamBlock b);
const ScalarField& block_field(const ParameterSet& p, ParamBlock b);

inline std::span<double> block_values(ParameterSet& p, ParamBlock b) {
  return block_field(p, b).values();
}
inline std::span<const double> block_values(const ParameterSet& p, ParamBlock b) {
  return block_field(p, b).values();
}

/// Box constraints defining the feasible parameter set.
struct Bounds {
  double d_min = 1e-9;  // cm^2/s
  double d_max = 1.0;
  double v_max = 1e4;   // cm/s
  double k_max = 10.0;  // 1/s
};

/// Componentwise clamp onto the feasible set: k in [0, k_max],
/// D in [d_min, d_max], velocity components in [-v_max, v_max].
/// Idempotent and a max-norm contraction per component.
ParameterSet project_parameters(ParameterSet p, const Bounds& b);

}  // namespace flowpet
