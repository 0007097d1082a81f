#include "flowpet/projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace flowpet {

double SinogramFrame::sum() const { return std::accumulate(v.begin(), v.end(), 0.0); }

double dot(const SinogramFrame& a, const SinogramFrame& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sinogram dot: size mismatch");
  double acc = 0.0;
  for (int k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

namespace {

// Amanatides-Woo traversal of one ray through the cell grid; appends
// (cell, intersection length) pairs.
void trace_ray(const Grid& g, double px, double py, double dx, double dy,
               std::vector<std::int32_t>& cols, std::vector<double>& weights) {
  const double lx = g.lx(), ly = g.ly();
  constexpr double inf = std::numeric_limits<double>::infinity();

  double tmin = -inf, tmax = inf;
  if (dx != 0.0) {
    const double t1 = (0.0 - px) / dx, t2 = (lx - px) / dx;
    tmin = std::max(tmin, std::min(t1, t2));
    tmax = std::min(tmax, std::max(t1, t2));
  } else if (px <= 0.0 || px >= lx) {
    return;
  }
  if (dy != 0.0) {
    const double t1 = (0.0 - py) / dy, t2 = (ly - py) / dy;
    tmin = std::max(tmin, std::min(t1, t2));
    tmax = std::min(tmax, std::max(t1, t2));
  } else if (py <= 0.0 || py >= ly) {
    return;
  }
  if (!(tmax > tmin)) return;

  // entry cell, nudged inward to be robust against corner hits
  const double nudge = 1e-12 * (tmax - tmin);
  const double ex = px + (tmin + nudge) * dx;
  const double ey = py + (tmin + nudge) * dy;
  int i = std::clamp(static_cast<int>(std::floor(ex / g.hx)), 0, g.nx - 1);
  int j = std::clamp(static_cast<int>(std::floor(ey / g.hy)), 0, g.ny - 1);

  // parametric distance to the next x/y face crossing
  double t_next_x = inf, t_next_y = inf;
  const double step_tx = dx != 0.0 ? g.hx / std::abs(dx) : inf;
  const double step_ty = dy != 0.0 ? g.hy / std::abs(dy) : inf;
  if (dx > 0.0)
    t_next_x = ((i + 1) * g.hx - px) / dx;
  else if (dx < 0.0)
    t_next_x = (i * g.hx - px) / dx;
  if (dy > 0.0)
    t_next_y = ((j + 1) * g.hy - py) / dy;
  else if (dy < 0.0)
    t_next_y = (j * g.hy - py) / dy;

  double t = tmin;
  while (true) {
    const double t_exit = std::min({t_next_x, t_next_y, tmax});
    const double len = t_exit - t;
    if (len > 0.0) {
      cols.push_back(static_cast<std::int32_t>(g.index(i, j)));
      weights.push_back(len);
    }
    if (t_exit >= tmax) break;
    if (t_next_x <= t_next_y) {
      i += dx > 0.0 ? 1 : -1;
      t_next_x += step_tx;
    } else {
      j += dy > 0.0 ? 1 : -1;
      t_next_y += step_ty;
    }
    if (i < 0 || i >= g.nx || j < 0 || j >= g.ny) break;
    t = t_exit;
  }
}

}  // namespace

Projector build_projector(const Grid& g, int n_angles, int n_bins) {
  if (n_angles < 1 || n_bins < 1)
    throw std::invalid_argument("build_projector: need at least one angle and one bin");
  Projector K;
  K.n_angles = n_angles;
  K.n_bins = n_bins;
  K.grid = g;
  const double lx = g.lx(), ly = g.ly();
  K.bin_width = std::hypot(lx, ly) / n_bins;
  const double cx = 0.5 * lx, cy = 0.5 * ly;

  K.row_ptr.assign(static_cast<size_t>(K.rays()) + 1, 0);
  for (int a = 0; a < n_angles; ++a) {
    const double theta = M_PI * a / n_angles;
    const double ux = std::cos(theta), uy = std::sin(theta);   // detector axis
    const double dx = -std::sin(theta), dy = std::cos(theta);  // ray direction
    for (int b = 0; b < n_bins; ++b) {
      const double s = (b + 0.5 - 0.5 * n_bins) * K.bin_width;
      trace_ray(g, cx + s * ux, cy + s * uy, dx, dy, K.col, K.weight);
      K.row_ptr[static_cast<size_t>(a * n_bins + b) + 1] =
          static_cast<std::int64_t>(K.col.size());
    }
  }

  SinogramFrame ones(n_angles, n_bins, 1.0);
  K.sens = ScalarField(g);
  for (int r = 0; r < K.rays(); ++r)
    for (std::int64_t k = K.row_ptr[static_cast<size_t>(r)];
         k < K.row_ptr[static_cast<size_t>(r) + 1]; ++k)
      K.sens[K.col[static_cast<size_t>(k)]] += K.weight[static_cast<size_t>(k)];
  return K;
}

SinogramFrame project(const Projector& K, const ScalarField& u) {
  if (!(u.grid() == K.grid)) throw std::invalid_argument("project: grid mismatch");
  SinogramFrame out(K.n_angles, K.n_bins);
  for (int r = 0; r < K.rays(); ++r) {
    double acc = 0.0;
    for (std::int64_t k = K.row_ptr[static_cast<size_t>(r)];
         k < K.row_ptr[static_cast<size_t>(r) + 1]; ++k)
      acc += K.weight[static_cast<size_t>(k)] * u[K.col[static_cast<size_t>(k)]];
    out[r] = acc;
  }
  return out;
}

ScalarField backproject(const Projector& K, const SinogramFrame& s) {
  if (s.n_angles != K.n_angles || s.n_bins != K.n_bins)
    throw std::invalid_argument("backproject: sinogram geometry mismatch");
  ScalarField out(K.grid);
  for (int r = 0; r < K.rays(); ++r) {
    const double g = s[r];
    if (g == 0.0) continue;
    for (std::int64_t k = K.row_ptr[static_cast<size_t>(r)];
         k < K.row_ptr[static_cast<size_t>(r) + 1]; ++k)
      out[K.col[static_cast<size_t>(k)]] += K.weight[static_cast<size_t>(k)] * g;
  }
  return out;
}

}  // namespace flowpet
