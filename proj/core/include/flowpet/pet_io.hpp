#pragma once

#include <string>

#include "flowpet/projector.hpp"

namespace flowpet {

// Sinogram container: magic "PDES1\n", dims (n_angles, n_bins) as 32-bit
// little-endian unsigned, then values as 64-bit little-endian floats.
void write_sinogram(const std::string& path, const SinogramFrame& f);
SinogramFrame read_sinogram(const std::string& path);

/// Numbered frame files (prefix_0000.sino, ...) plus a manifest text file.
void write_sinogram_sequence(const std::string& dir, const std::string& prefix,
                             const SinogramSequence& seq);
SinogramSequence read_sinogram_sequence(const std::string& dir, const std::string& prefix);

// Projector container: magic "PDEK1\n", geometry header, then the
// coordinate list (row, col, weight). The sensitivity image is rebuilt
// on load.
void write_projector(const std::string& path, const Projector& K);
Projector read_projector(const std::string& path);

}  // namespace flowpet
