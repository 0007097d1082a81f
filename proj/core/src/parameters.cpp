#include "flowpet/parameters.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace flowpet {

bool ParameterSet::all_finite() const {
  return k1.all_finite() && k2.all_finite() && k3.all_finite() &&
         dA.all_finite() && dT.all_finite() && dV.all_finite() &&
         vA.all_finite() && vT.all_finite() && vV.all_finite();
}

std::string_view block_name(ParamBlock b) {
  switch (b) {
    case ParamBlock::K1:  return "k1";
    case ParamBlock::K2:  return "k2";
    case ParamBlock::K3:  return "k3";
    case ParamBlock::DA:  return "dA";
    case ParamBlock::DT:  return "dT";
    case ParamBlock::DV:  return "dV";
    case ParamBlock::VAx: return "vA_x";
    case ParamBlock::VAy: return "vA_y";
    case ParamBlock::VTx: return "vT_x";
    case ParamBlock::VTy: return "vT_y";
    case ParamBlock::VVx: return "vV_x";
    case ParamBlock::VVy: return "vV_y";
  }
  return "?";
}

ParamBlock block_from_name(std::string_view name) {
  for (ParamBlock b : all_param_blocks)
    if (block_name(b) == name) return b;
  throw std::invalid_argument("unknown parameter block: " + std::string(name));
}

ScalarField& block_field(ParameterSet& p, ParamBlock b) {
  switch (b) {
    case ParamBlock::K1:  return p.k1;
    case ParamBlock::K2:  return p.k2;
    case ParamBlock::K3:  return p.k3;
    case ParamBlock::DA:  return p.dA;
    case ParamBlock::DT:  return p.dT;
    case ParamBlock::DV:  return p.dV;
    case ParamBlock::VAx: return p.vA.x();
    case ParamBlock::VAy: return p.vA.y();
    case ParamBlock::VTx: return p.vT.x();
    case ParamBlock::VTy: return p.vT.y();
    case ParamBlock::VVx: return p.vV.x();
    case ParamBlock::VVy: return p.vV.y();
  }
  throw std::logic_error("block_field: bad block");
}

const ScalarField& block_field(const ParameterSet& p, ParamBlock b) {
  return block_field(const_cast<ParameterSet&>(p), b);
}

namespace {
void clamp_field(ScalarField& f, double lo, double hi) {
  for (double& x : f.values()) x = std::clamp(x, lo, hi);
}
}  // namespace

ParameterSet project_parameters(ParameterSet p, const Bounds& b) {
  clamp_field(p.k1, 0.0, b.k_max);
  clamp_field(p.k2, 0.0, b.k_max);
  clamp_field(p.k3, 0.0, b.k_max);
  clamp_field(p.dA, b.d_min, b.d_max);
  clamp_field(p.dT, b.d_min, b.d_max);
  clamp_field(p.dV, b.d_min, b.d_max);
  for (VectorField* v : {&p.vA, &p.vT, &p.vV}) {
    clamp_field(v->x(), -b.v_max, b.v_max);
    clamp_field(v->y(), -b.v_max, b.v_max);
  }
  return p;
}

}  // namespace flowpet
