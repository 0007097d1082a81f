#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flowpet/adjoint.hpp"
#include "flowpet/em.hpp"
#include "flowpet/fidelity.hpp"
#include "flowpet/screened.hpp"

namespace flowpet {

struct ReconConfig {
  double alpha = 1.0;  // global weight on the regularizer
  RegularizerConfig reg;
  Bounds bounds;
  int outer_iterations = 50;
  int inner_iterations = 2;
  double eta_damp = 1.0;   // extra damping: effective step = tau_inner/eta_damp
  double tau_inner = 1.0;  // explicit step on the weighted misfit
  /// Per-block multipliers on the inner step; the blocks differ by many
  /// orders of magnitude in scale, a single step cannot serve all twelve.
  std::array<double, kNumParamBlocks> step_scale = {1, 1, 1, 1, 1, 1,
                                                    1, 1, 1, 1, 1, 1};
  double eps_w = kWeightFloor;
  double eps_em = kEmFloor;
  double outer_tol = 1e-6;   // stop on relative parameter change
  double inner_tol = 0.0;    // optional inner stop (0 = run all iterations)
  int max_step_halvings = 40;
  ScreenedSolveOptions screened{1e-13, 2000};
};

struct ReconReport {
  struct Row {
    int outer = 0;
    double objective = 0.0;   // KL data term + alpha * R(p)
    double data_term = 0.0;
    double reg_value = 0.0;   // R(p), unweighted
    double param_change = 0.0;
    long negative_cells = 0;  // positivity breaches during this iteration's solves
    double wall_seconds = 0.0;
  };
  std::vector<Row> rows;
  long em_floored_bins = 0;
  long step_halvings = 0;
  bool converged = false;
};

/// Everything the PDE side of the problem needs besides the parameters.
struct ModelContext {
  ConcentrationState c0;
  BoundarySpec bc;
  SolverConfig solver;
  FrameMap frames;
};

/// Weighted least-squares misfit of the parameter half-problem:
/// 1/2 * frame_duration * cell_area * sum omega * (u - u_half)^2 with
/// omega = sens / max(u_outer, eps_w).
double weighted_misfit(const std::vector<ScalarField>& u,
                       const std::vector<ScalarField>& u_half,
                       const std::vector<ScalarField>& u_outer, const ScalarField& sens,
                       double frame_duration, double eps_w = kWeightFloor);

struct HalfStepResult {
  ParameterSet p;
  Trajectory traj;              // forward solve at the returned p
  std::vector<ScalarField> u;   // frame activity at the returned p
  double misfit = 0.0;
  int halvings = 0;
  long breach_cells = 0;
};

/// Inner forward-backward iterations on the weighted misfit: explicit
/// adjoint-gradient step on the data term, implicit (proximal) treatment
/// of the quadratic regularizer via per-block screened-Poisson solves,
/// then projection onto the bounds. A misfit increase halves the step.
HalfStepResult parameter_half_step(const ParameterSet& p_k,
                                   const std::vector<ScalarField>& u_half,
                                   const std::vector<ScalarField>& u_outer,
                                   const ScalarField& sens, const ModelContext& mc,
                                   const ReconConfig& cfg);

/// Eq-style variational objective: KL(K G(p), f) + alpha * R(p).
struct ObjectiveParts {
  double total = 0.0;
  double data = 0.0;
  double reg = 0.0;
};

double objective(const ParameterSet& p, const SinogramSequence& f, const Projector& K,
                 const ModelContext& mc, const ReconConfig& cfg,
                 ObjectiveParts* parts = nullptr);

/// objective shifted by the perfect-fit data value (Bregman form of the
/// KL term): same gradient and minimizer, small near the fit, suitable
/// as a finite-difference probe.
double objective_gap(const ParameterSet& p, const SinogramSequence& f, const Projector& K,
                     const ModelContext& mc, const ReconConfig& cfg);

/// Adjoint gradient of the full objective (data term through the KL
/// derivative backprojected into image space, plus the regularizer).
GradientSet objective_gradient(const ParameterSet& p, const SinogramSequence& f,
                               const Projector& K, const ModelContext& mc,
                               const ReconConfig& cfg, ObjectiveParts* parts = nullptr);

using IterationCallback =
    std::function<void(int outer, const ParameterSet& p, const ReconReport& report)>;

/// Outer EM / backward-splitting loop: alternates the multiplicative EM
/// half-step on the activity with the parameter half-step, starting from
/// the regularizer priors. Deterministic for identical inputs.
std::pair<ParameterSet, ReconReport> reconstruct(const SinogramSequence& f,
                                                 const Projector& K, const ModelContext& mc,
                                                 const ReconConfig& cfg,
                                                 const IterationCallback& on_iteration = {});

}  // namespace flowpet
