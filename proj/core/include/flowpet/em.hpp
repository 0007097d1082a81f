#pragma once

#include <vector>

#include "flowpet/projector.hpp"

namespace flowpet {

inline constexpr double kEmFloor = 1e-12;  // eps_em

struct EmStats {
  long floored_bins = 0;  // bins with counts > 0 but projection <= floor
};

/// One multiplicative EM half-step per frame:
///   u_half = (u / K^T 1) * K^T( f / (K u) ),
/// with K u floored at eps_em on bins with counts, 0/0 treated as 0, and
/// u_half = 0 outside the field of view (sensitivity 0). Nonnegativity
/// preserving; u is a fixed point iff K u = f on measured bins.
std::vector<ScalarField> em_half_step(const std::vector<ScalarField>& u,
                                      const Projector& K, const SinogramSequence& counts,
                                      EmStats* stats = nullptr, double eps_em = kEmFloor);

}  // namespace flowpet
