#pragma once

#include <utility>
#include <vector>

#include "flowpet/boundary.hpp"
#include "flowpet/parameters.hpp"

namespace flowpet {

/// Concentrations of the three compartments at one time level.
struct ConcentrationState {
  ScalarField cA, cT, cV;
  double time = 0.0;

  ConcentrationState() = default;
  explicit ConcentrationState(const Grid& g) : cA(g), cT(g), cV(g) {}
  const Grid& grid() const { return cA.grid(); }
};

ScalarField& species_field(ConcentrationState& s, Species sp);
const ScalarField& species_field(const ConcentrationState& s, Species sp);
const ScalarField& species_diffusivity(const ParameterSet& p, Species sp);
const VectorField& species_velocity(const ParameterSet& p, Species sp);

struct SolverConfig {
  double tau = 3e-5;  // s
  int n_steps = 1;
  double k0 = 0.0;    // radioactive decay rate, 1/s
};

/// Negative-value bookkeeping of the stepper. Values below zero are
/// clamped; anything below -1e-12 counts as a genuine positivity breach.
struct StepStats {
  long clamped_cells = 0;
  long breach_cells = 0;    // below -1e-12 before clamping
  double worst_negative = 0.0;

  void merge(const StepStats& o);
};

/// cA(x) = amplitude*(1 - x1^2)*(n_param - x2)*x2 with x1 mapped affinely
/// to [-1,1] across the grid width and x2 to [0, n_param] across the
/// height; cT = cV = 0.
ConcentrationState initial_condition(const Grid& g, double amplitude, double n_param);

/// x / (e^x - 1), evaluated with a series branch near zero; smooth,
/// positive, and B(-x) = B(x) + x.
double bernoulli(double x);
/// d/dx of bernoulli.
double bernoulli_deriv(double x);

/// Scharfetter-Gummel face coefficients (c_left, c_right) such that the
/// face flux in the "advection down +x for v > 0" convention is
///   F = c_left*C_left - c_right*C_right,
/// with c_left = (d/h)*B(-v*h/d) and c_right = (d/h)*B(v*h/d).
std::pair<double, double> sg_face_coefficients(double d_face, double v_face, double h);

struct Trajectory {
  std::vector<ConcentrationState> states;  // n_steps + 1 entries
  double tau = 0.0;
  StepStats stats;

  const Grid& grid() const { return states.front().grid(); }
  int n_steps() const { return static_cast<int>(states.size()) - 1; }
};

/// One time step tau: implicit x-sweep, implicit y-sweep, implicit
/// reaction solve per cell, in that order. Face D and V are arithmetic
/// means of the adjacent cells; boundary faces carry the prescribed j_in
/// (inflow) or drain at v_out (outflow).
ConcentrationState adi_step(const ConcentrationState& state, const ParameterSet& p,
                            const BoundarySpec& bc, const SolverConfig& cfg,
                            StepStats* stats = nullptr);

Trajectory solve_forward(const ParameterSet& p, const ConcentrationState& c0,
                         const BoundarySpec& bc, const SolverConfig& cfg);

/// Total tracer activity u = cA + cT + cV per time level.
std::vector<ScalarField> activity(const Trajectory& traj);
ScalarField activity(const ConcentrationState& s);

/// Uniform binning of n_steps into n_frames; the frame activity is the
/// state at the frame's midpoint step.
struct FrameMap {
  int n_frames = 0;
  int steps_per_frame = 0;

  /// Requires n_steps divisible by n_frames.
  static FrameMap uniform(int n_steps, int n_frames);
  int state_index(int frame) const {
    return frame * steps_per_frame + steps_per_frame / 2;
  }
  double frame_duration(double tau) const { return steps_per_frame * tau; }
};

std::vector<ScalarField> frame_activity(const Trajectory& traj, const FrameMap& fm);

namespace detail {

/// Tridiagonal system of one implicit transport line solve
/// (I - tau*L) c_new = c_old + tau*src; src holds inflow terms.
struct LineSystem {
  std::vector<double> lower, diag, upper, src;
  void resize(size_t n) {
    lower.assign(n, 0.0);
    diag.assign(n, 1.0);
    upper.assign(n, 0.0);
    src.assign(n, 0.0);
  }
};

void assemble_line_x(const ScalarField& D, const ScalarField& Vx, const BoundarySpec& bc,
                     Species sp, double tau, int j, LineSystem& sys);
void assemble_line_y(const ScalarField& D, const ScalarField& Vy, const BoundarySpec& bc,
                     Species sp, double tau, int i, LineSystem& sys);

/// In-place implicit sweeps (sub-steps i and ii of adi_step) and their
/// exact transposes. The transposed solves are homogeneous: boundary
/// inflow sources do not transpose.
void apply_sweep_x(ConcentrationState& s, const ParameterSet& p, const BoundarySpec& bc,
                   double tau);
void apply_sweep_y(ConcentrationState& s, const ParameterSet& p, const BoundarySpec& bc,
                   double tau);
void apply_sweep_x_transposed(ConcentrationState& s, const ParameterSet& p,
                              const BoundarySpec& bc, double tau);
void apply_sweep_y_transposed(ConcentrationState& s, const ParameterSet& p,
                              const BoundarySpec& bc, double tau);
/// In-place per-cell reaction solve (sub-step iii) and its transpose.
void apply_reaction(ConcentrationState& s, const ParameterSet& p, double k0, double tau);
void apply_reaction_transposed(ConcentrationState& s, const ParameterSet& p, double k0,
                               double tau);

/// Direct solve of the per-cell implicit reaction system
/// (I - tau*M) (A,V,T)^T = rhs in the (A,V,T) ordering, and its transpose.
void reaction_solve(double k1, double k2, double k3, double k0, double tau,
                    double& a, double& v, double& t);
void reaction_solve_transposed(double k1, double k2, double k3, double k0, double tau,
                               double& a, double& v, double& t);

}  // namespace detail

}  // namespace flowpet
