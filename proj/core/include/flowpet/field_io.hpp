#pragma once

#include <string>
#include <vector>

#include "flowpet/field.hpp"

namespace flowpet {

// Field container: magic "PDEF1\n", then nx, ny as 32-bit little-endian
// unsigned, then nx*ny 64-bit little-endian floats, row-major.

void write_field(const std::string& path, const ScalarField& f);

struct RawField {
  int nx = 0;
  int ny = 0;
  std::vector<double> values;
};

/// Reads a field file; validates magic, dimensions and finiteness.
RawField read_field_raw(const std::string& path);

/// Reads a field file and binds it to the given grid (dims must match).
ScalarField read_field(const std::string& path, const Grid& g);

/// CSV export, one line per grid row, values with round-trip precision.
void write_field_csv(const std::string& path, const ScalarField& f);
ScalarField read_field_csv(const std::string& path, const Grid& g);

}  // namespace flowpet
