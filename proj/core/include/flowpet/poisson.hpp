#pragma once

#include <cstdint>

#include "flowpet/projector.hpp"

namespace flowpet {

/// Draws integer counts with each entry ~ Poisson(scale * expected).
/// Deterministic for a fixed seed (single sequential mt19937_64 stream).
SinogramSequence sample_poisson(const SinogramSequence& expected, double scale,
                                std::uint64_t seed);

}  // namespace flowpet
