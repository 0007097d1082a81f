#include "flowpet/grid.hpp"

#include <stdexcept>
#include <string>

namespace flowpet {

Grid build_grid(int nx, int ny, double lx, double ly) {
  if (nx < 2 || ny < 2)
    throw std::invalid_argument("build_grid: need at least 2 cells per direction, got " +
                                std::to_string(nx) + "x" + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0))
    throw std::invalid_argument("build_grid: domain extents must be positive");
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.hx = lx / nx;
  g.hy = ly / ny;
  g.x0 = 0.5 * g.hx;
  g.y0 = 0.5 * g.hy;
  return g;
}

}  // namespace flowpet
