#include "flowpet/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flowpet {

namespace {

void fill(ScalarField& f, double v) { std::fill(f.values().begin(), f.values().end(), v); }

ParameterSet constant_phantom(const Grid& g) {
  ParameterSet p(g);
  fill(p.k1, 0.9);
  fill(p.k2, 0.75);
  fill(p.k3, 0.9);
  fill(p.dA, 3e-7);
  fill(p.dT, 3e-6);
  fill(p.dV, 3e-7);
  fill(p.vA.x(), 1e-4);
  fill(p.vA.y(), 700.0);
  fill(p.vT.x(), -50.0);
  fill(p.vT.y(), 1e-4);
  fill(p.vV.x(), 1e-4);
  fill(p.vV.y(), 700.0);
  return p;
}

int span_cells(double fraction, int n) {
  return std::clamp(static_cast<int>(std::lround(fraction * n)), 1, n);
}

}  // namespace

std::vector<std::uint8_t> phantom_defect_mask(const std::string& preset, const Grid& g,
                                              const PhantomOptions& opt) {
  std::vector<std::uint8_t> mask(static_cast<size_t>(g.cells()), 0);
  if (preset == "constant") return mask;
  if (preset == "edge_defect") {
    const int w = span_cells(opt.strip_fraction,
                             edge_length(g, opt.defect_edge) == g.ny ? g.nx : g.ny);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        bool in = false;
        switch (opt.defect_edge) {
          case Edge::Left: in = i < w; break;
          case Edge::Right: in = i >= g.nx - w; break;
          case Edge::Bottom: in = j < w; break;
          case Edge::Top: in = j >= g.ny - w; break;
        }
        if (in) mask[static_cast<size_t>(g.index(i, j))] = 1;
      }
    return mask;
  }
  if (preset == "inner_defect") {
    const int w = span_cells(opt.block_fraction, g.nx);
    const int h = span_cells(opt.block_fraction, g.ny);
    const int i0 = (g.nx - w) / 2, j0 = (g.ny - h) / 2;
    for (int j = j0; j < j0 + h; ++j)
      for (int i = i0; i < i0 + w; ++i) mask[static_cast<size_t>(g.index(i, j))] = 1;
    return mask;
  }
  throw std::invalid_argument("unknown phantom preset: " + preset);
}

ParameterSet phantom(const std::string& preset, const Grid& g, const PhantomOptions& opt) {
  ParameterSet p = constant_phantom(g);
  const std::vector<std::uint8_t> mask = phantom_defect_mask(preset, g, opt);
  for (int c = 0; c < g.cells(); ++c) {
    if (mask[static_cast<size_t>(c)]) {
      p.k1[c] = 0.0;
      p.k2[c] = 0.0;
    }
  }
  return p;
}

ReferenceRegEntry reference_reg_entry(ParamBlock b) {
  switch (b) {
    case ParamBlock::K1:  return {0.89, 0.0171, 0.0008};
    case ParamBlock::K2:  return {0.70, 0.0158, 0.0001};
    case ParamBlock::K3:  return {0.85, 0.0164, 0.0001};
    case ParamBlock::DA:  return {1e-3, 0.0003, 0.0004};
    case ParamBlock::DT:  return {1e-2, 0.0003, 0.0004};
    case ParamBlock::DV:  return {1e-3, 0.0003, 0.0004};
    case ParamBlock::VAx: return {0.1, 0.0010, 0.0001};
    case ParamBlock::VAy: return {15.0, 1.1000, 0.0001};
    case ParamBlock::VTx: return {-5.0, 1.1220, 0.0001};
    case ParamBlock::VTy: return {0.1, 0.0010, 0.0001};
    case ParamBlock::VVx: return {0.1, 0.0010, 0.0001};
    case ParamBlock::VVy: return {15.0, 1.1000, 0.0001};
  }
  throw std::logic_error("reference_reg_entry: bad block");
}

RegularizerConfig reference_regularizer(const Grid& g) {
  RegularizerConfig r;
  r.prior = ParameterSet(g);
  for (ParamBlock b : all_param_blocks) {
    const ReferenceRegEntry e = reference_reg_entry(b);
    fill(block_field(r.prior, b), e.prior);
    r.alpha_of(b) = e.alpha;
    r.xi_of(b) = e.xi;
  }
  return r;
}

}  // namespace flowpet
