#pragma once

#include <cstdint>
#include <vector>

#include "flowpet/field.hpp"

namespace flowpet {

/// One sinogram time frame: n_angles x n_bins values, angle-major.
struct SinogramFrame {
  int n_angles = 0;
  int n_bins = 0;
  int frame_index = 0;
  std::vector<double> v;

  SinogramFrame() = default;
  SinogramFrame(int na, int nb, double fill = 0.0)
      : n_angles(na), n_bins(nb), v(static_cast<size_t>(na) * nb, fill) {}
  int size() const { return n_angles * n_bins; }
  double& operator[](int k) { return v[static_cast<size_t>(k)]; }
  double operator[](int k) const { return v[static_cast<size_t>(k)]; }
  double& at(int angle, int bin) { return v[static_cast<size_t>(angle * n_bins + bin)]; }
  double at(int angle, int bin) const { return v[static_cast<size_t>(angle * n_bins + bin)]; }
  double sum() const;
};

struct SinogramSequence {
  std::vector<SinogramFrame> frames;
  double frame_duration = 0.0;  // s

  int n_frames() const { return static_cast<int>(frames.size()); }
};

/// Sparse nonnegative projection operator from image space to sinogram
/// space (parallel-beam line-intersection lengths), with the cached
/// sensitivity image s = K^T 1. CSR over rays (rows), angle-major.
struct Projector {
  int n_angles = 0;
  int n_bins = 0;
  Grid grid;
  double bin_width = 0.0;  // cm

  std::vector<std::int64_t> row_ptr;  // rays + 1
  std::vector<std::int32_t> col;
  std::vector<double> weight;
  ScalarField sens;

  int rays() const { return n_angles * n_bins; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(col.size()); }
};

/// Parallel-beam projector: n_angles equally spaced in [0, pi), ray at
/// angle 0 running along +y; detector bins centered on the grid, spaced
/// diag/n_bins so every angle covers the whole domain. Deterministic.
Projector build_projector(const Grid& g, int n_angles, int n_bins);

SinogramFrame project(const Projector& K, const ScalarField& u);
ScalarField backproject(const Projector& K, const SinogramFrame& g);

double dot(const SinogramFrame& a, const SinogramFrame& b);

}  // namespace flowpet
