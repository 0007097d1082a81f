#pragma once

#include <string>

#include "flowpet/pet_io.hpp"
#include "flowpet/run_config.hpp"

namespace flowpet {

/// Synthetic measurement generation: forward simulation of the preset
/// phantom on a refine-times finer grid, cell-average restriction of the
/// frame activities to the reconstruction grid, projection, count scaling
/// and optional Poisson sampling.
struct SynthOutput {
  Grid grid;
  Projector K;
  ParameterSet truth;
  std::vector<std::uint8_t> defect_mask;
  SinogramSequence expected;  // scale * K(restricted activity)
  SinogramSequence data;      // Poisson counts, or == expected when not sampling
};

SynthOutput make_synthetic_data(const RunConfig& cfg);

/// Projection operator with the count calibration (noise_scale) folded
/// into the weights, as used by synth and reconstruct.
Projector make_count_projector(const RunConfig& cfg, const Grid& g);

/// Cell-average restriction from a refine-times finer grid.
ScalarField restrict_to(const Grid& coarse, const ScalarField& fine, int refine);

struct ReconstructOutput {
  ParameterSet p;
  ReconReport report;
};

/// CLI commands. Each writes its artifacts plus the resolved config into
/// the output directory and returns a process exit status.
int run_simulate(const RunConfig& cfg);
int run_synth(const RunConfig& cfg);
int run_reconstruct(const RunConfig& cfg);
int run_gradcheck(const RunConfig& cfg);
int run_phantom(const RunConfig& cfg);
int run_command(const RunConfig& cfg, const std::string& command);

}  // namespace flowpet
