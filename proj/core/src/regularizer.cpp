#include "flowpet/regularizer.hpp"

#include <stdexcept>

namespace flowpet {

namespace {

void check_shapes(const ParameterSet& p, const RegularizerConfig& r) {
  if (!(p.grid() == r.prior.grid()))
    throw std::invalid_argument("regularizer: parameter/prior grid mismatch");
  for (double a : r.alpha)
    if (!(a >= 0.0)) throw std::invalid_argument("regularizer: negative alpha weight");
  for (double x : r.xi)
    if (!(x >= 0.0)) throw std::invalid_argument("regularizer: negative xi weight");
}

double block_value(const ScalarField& f, const ScalarField& prior, double alpha, double xi) {
  const Grid& g = f.grid();
  const double area = g.cell_area();
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double d = f.at(i, j) - prior.at(i, j);
      double grad2 = 0.0;
      if (i + 1 < g.nx) {
        const double gx = (f.at(i + 1, j) - f.at(i, j)) / g.hx;
        grad2 += gx * gx;
      }
      if (j + 1 < g.ny) {
        const double gy = (f.at(i, j + 1) - f.at(i, j)) / g.hy;
        grad2 += gy * gy;
      }
      acc += area * (alpha * d * d + xi * grad2);
    }
  }
  return acc;
}

}  // namespace

ScalarField lap_neumann(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  const double ihx2 = 1.0 / (g.hx * g.hx);
  const double ihy2 = 1.0 / (g.hy * g.hy);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      double acc = 0.0;
      if (i + 1 < g.nx) acc += (f.at(i + 1, j) - f.at(i, j)) * ihx2;
      if (i > 0) acc -= (f.at(i, j) - f.at(i - 1, j)) * ihx2;
      if (j + 1 < g.ny) acc += (f.at(i, j + 1) - f.at(i, j)) * ihy2;
      if (j > 0) acc -= (f.at(i, j) - f.at(i, j - 1)) * ihy2;
      out.at(i, j) = acc;
    }
  }
  return out;
}

double regularizer_value(const ParameterSet& p, const RegularizerConfig& r) {
  check_shapes(p, r);
  double acc = 0.0;
  for (ParamBlock b : all_param_blocks)
    acc += block_value(block_field(p, b), block_field(r.prior, b),
                       r.alpha_of(b), r.xi_of(b));
  return acc;
}

ParameterSet regularizer_gradient(const ParameterSet& p, const RegularizerConfig& r) {
  check_shapes(p, r);
  const Grid& g = p.grid();
  const double area = g.cell_area();
  ParameterSet grad(g);
  for (ParamBlock b : all_param_blocks) {
    const ScalarField& f = block_field(p, b);
    const ScalarField& prior = block_field(r.prior, b);
    ScalarField& out = block_field(grad, b);
    const double alpha = r.alpha_of(b);
    const double xi = r.xi_of(b);
    const ScalarField lap = lap_neumann(f);
    for (int c = 0; c < f.size(); ++c)
      out[c] = area * (2.0 * alpha * (f[c] - prior[c]) - 2.0 * xi * lap[c]);
  }
  return grad;
}

}  // namespace flowpet
