#pragma once

#include <vector>

#include "flowpet/forward.hpp"
#include "flowpet/regularizer.hpp"

namespace flowpet {

/// Multipliers paired with the three evolution equations:
/// eta with the cA equation, mu with cT, gamma with cV.
struct AdjointState {
  ScalarField eta, mu, gamma;

  AdjointState() = default;
  explicit AdjointState(const Grid& g) : eta(g), mu(g), gamma(g) {}
};

/// Same shape as the parameters: one partial derivative per cell per block.
using GradientSet = ParameterSet;

inline constexpr double kWeightFloor = 1e-9;  // eps_w

/// Weighted data residual of the parameter half-problem, per frame:
/// sens * (u - u_half) / max(u_outer, eps_w). u_outer is the activity of
/// the outer iterate that defines the weight; on the first inner
/// iteration u == u_outer.
std::vector<ScalarField> residual_weight(const std::vector<ScalarField>& u,
                                         const std::vector<ScalarField>& u_half,
                                         const std::vector<ScalarField>& u_outer,
                                         const ScalarField& sens,
                                         double eps_w = kWeightFloor);

/// Backward sweep of the exact transposes of the three ADI sub-steps in
/// reverse order (reaction, y, x), injecting frame_sources[f] -- the
/// derivative of the data functional with respect to the frame activity
/// -- into all three equations at the frame's state index. Returns the
/// states psi^m = dQ/dC^m for m = 0..n_steps.
std::vector<AdjointState> solve_adjoint(const ParameterSet& p, const Trajectory& traj,
                                        const std::vector<ScalarField>& frame_sources,
                                        const FrameMap& fm, const BoundarySpec& bc,
                                        const SolverConfig& cfg);

/// Data-term gradient with respect to all 12 parameter blocks: the exact
/// discrete adjoint products of the Scharfetter-Gummel coefficient
/// derivatives and the reaction coupling, accumulated over all steps with
/// the rectangle rule in time.
GradientSet assemble_gradient(const ParameterSet& p, const Trajectory& traj,
                              const std::vector<AdjointState>& adj, const BoundarySpec& bc,
                              const SolverConfig& cfg);

/// Data-term gradient plus alpha * regularizer gradient.
GradientSet assemble_gradient(const ParameterSet& p, const Trajectory& traj,
                              const std::vector<AdjointState>& adj, const BoundarySpec& bc,
                              const SolverConfig& cfg, const RegularizerConfig& reg,
                              double alpha);

}  // namespace flowpet
