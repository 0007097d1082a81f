#pragma once

#include <array>

#include "flowpet/parameters.hpp"

namespace flowpet {

/// Quadratic regularizer: per block i,
///   R_i(p) = sum_cells area * ( alpha_i*(p - prior)^2 + xi_i*|grad_h p|^2 )
/// with forward-difference gradients and homogeneous Neumann closure.
/// The conventional 1/2 is absorbed into the weights; the gradient of the
/// functional therefore carries a factor 2.
struct RegularizerConfig {
  ParameterSet prior;                             // p*
  std::array<double, kNumParamBlocks> alpha{};    // a-priori weights, >= 0
  std::array<double, kNumParamBlocks> xi{};       // gradient weights, >= 0

  double& alpha_of(ParamBlock b) { return alpha[static_cast<int>(b)]; }
  double alpha_of(ParamBlock b) const { return alpha[static_cast<int>(b)]; }
  double& xi_of(ParamBlock b) { return xi[static_cast<int>(b)]; }
  double xi_of(ParamBlock b) const { return xi[static_cast<int>(b)]; }
};

double regularizer_value(const ParameterSet& p, const RegularizerConfig& r);

/// Exact partial derivatives of regularizer_value with respect to every
/// cell value: area * (2*alpha_i*(p - prior) - 2*xi_i*lap_h p), where lap_h
/// is the 5-point Laplacian with Neumann closure (the adjoint of the
/// forward differences used in the value).
ParameterSet regularizer_gradient(const ParameterSet& p, const RegularizerConfig& r);

/// 5-point Laplacian with homogeneous Neumann closure, written so that
/// -lap_neumann is exactly the adjoint composition of the forward
/// differences in regularizer_value.
ScalarField lap_neumann(const ScalarField& f);

}  // namespace flowpet
