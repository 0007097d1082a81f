#pragma once

#include <cstddef>

namespace flowpet {

/// Uniform 2-D cell-centered grid over [0, nx*hx] x [0, ny*hy].
/// Cell (i,j) has its center at (x0 + i*hx, y0 + j*hy); storage is
/// row-major with j (the y index) as the slow dimension.
struct Grid {
  int nx = 0;
  int ny = 0;
  double hx = 0.0;  // cm
  double hy = 0.0;  // cm
  double x0 = 0.0;  // center of cell (0,0), cm
  double y0 = 0.0;

  int cells() const { return nx * ny; }
  int index(int i, int j) const { return j * nx + i; }
  double x(int i) const { return x0 + i * hx; }
  double y(int j) const { return y0 + j * hy; }
  double lx() const { return nx * hx; }
  double ly() const { return ny * hy; }
  double cell_area() const { return hx * hy; }

  bool operator==(const Grid&) const = default;
};

/// Grid with nx x ny cells covering an lx x ly rectangle, cell (0,0)
/// centered at (hx/2, hy/2). Throws std::invalid_argument on
/// nonpositive extents or fewer than 2 cells per direction.
Grid build_grid(int nx, int ny, double lx, double ly);

}  // namespace flowpet
