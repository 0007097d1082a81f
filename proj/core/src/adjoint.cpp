#include "flowpet/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flowpet {

namespace {

// lambda containers reuse ConcentrationState; cA/cT/cV hold the
// multipliers of the A/T/V equations.
ConcentrationState to_state(const AdjointState& a) {
  ConcentrationState s;
  s.cA = a.eta;
  s.cT = a.mu;
  s.cV = a.gamma;
  return s;
}

AdjointState to_adjoint(const ConcentrationState& s) {
  AdjointState a;
  a.eta = s.cA;
  a.mu = s.cT;
  a.gamma = s.cV;
  return a;
}

void inject(ConcentrationState& psi, const ScalarField& source) {
  psi.cA += source;
  psi.cT += source;
  psi.cV += source;
}

// Gradient contribution of one sweep direction for one species at one
// step: d/dp of <lambda, tau * L C> over the interior faces, chained to
// the two adjacent cells through the arithmetic face means.
void accumulate_transport_x(const ScalarField& D, const ScalarField& Vx,
                            const ScalarField& lam, const ScalarField& c, double tau,
                            ScalarField& gD, ScalarField& gVx) {
  const Grid& g = D.grid();
  const double h = g.hx;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double d_f = 0.5 * (D.at(i, j) + D.at(i + 1, j));
      const double v_f = 0.5 * (Vx.at(i, j) + Vx.at(i + 1, j));
      if (!(d_f > 0.0))
        throw std::invalid_argument("assemble_gradient: needs face diffusivity > 0");
      const double xi = v_f * h / d_f;
      const double bm_ = bernoulli(-xi), bp_ = bernoulli(xi);
      const double bmd = bernoulli_deriv(-xi), bpd = bernoulli_deriv(xi);
      const double cl = c.at(i, j), cr = c.at(i + 1, j);
      const double dG_dv = -(bmd * cr + bpd * cl);
      const double dG_dd = ((bm_ + xi * bmd) * cr - (bp_ - xi * bpd) * cl) / h;
      const double w = tau / h * (lam.at(i, j) - lam.at(i + 1, j));
      gD.at(i, j) += 0.5 * w * dG_dd;
      gD.at(i + 1, j) += 0.5 * w * dG_dd;
      gVx.at(i, j) += 0.5 * w * dG_dv;
      gVx.at(i + 1, j) += 0.5 * w * dG_dv;
    }
  }
}

void accumulate_transport_y(const ScalarField& D, const ScalarField& Vy,
                            const ScalarField& lam, const ScalarField& c, double tau,
                            ScalarField& gD, ScalarField& gVy) {
  const Grid& g = D.grid();
  const double h = g.hy;
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double d_f = 0.5 * (D.at(i, j) + D.at(i, j + 1));
      const double v_f = 0.5 * (Vy.at(i, j) + Vy.at(i, j + 1));
      if (!(d_f > 0.0))
        throw std::invalid_argument("assemble_gradient: needs face diffusivity > 0");
      const double xi = v_f * h / d_f;
      const double bm_ = bernoulli(-xi), bp_ = bernoulli(xi);
      const double bmd = bernoulli_deriv(-xi), bpd = bernoulli_deriv(xi);
      const double cl = c.at(i, j), cr = c.at(i, j + 1);
      const double dG_dv = -(bmd * cr + bpd * cl);
      const double dG_dd = ((bm_ + xi * bmd) * cr - (bp_ - xi * bpd) * cl) / h;
      const double w = tau / h * (lam.at(i, j) - lam.at(i, j + 1));
      gD.at(i, j) += 0.5 * w * dG_dd;
      gD.at(i, j + 1) += 0.5 * w * dG_dd;
      gVy.at(i, j) += 0.5 * w * dG_dv;
      gVy.at(i, j + 1) += 0.5 * w * dG_dv;
    }
  }
}

std::vector<int> frame_of_state(const Trajectory& traj, const FrameMap& fm) {
  std::vector<int> map(traj.states.size(), -1);
  for (int f = 0; f < fm.n_frames; ++f) map[static_cast<size_t>(fm.state_index(f))] = f;
  return map;
}

}  // namespace

std::vector<ScalarField> residual_weight(const std::vector<ScalarField>& u,
                                         const std::vector<ScalarField>& u_half,
                                         const std::vector<ScalarField>& u_outer,
                                         const ScalarField& sens, double eps_w) {
  if (u.size() != u_half.size() || u.size() != u_outer.size())
    throw std::invalid_argument("residual_weight: frame count mismatch");
  std::vector<ScalarField> out;
  out.reserve(u.size());
  for (size_t f = 0; f < u.size(); ++f) {
    ScalarField w(sens.grid());
    for (int c = 0; c < w.size(); ++c)
      w[c] = sens[c] * (u[f][c] - u_half[f][c]) / std::max(u_outer[f][c], eps_w);
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<AdjointState> solve_adjoint(const ParameterSet& p, const Trajectory& traj,
                                        const std::vector<ScalarField>& frame_sources,
                                        const FrameMap& fm, const BoundarySpec& bc,
                                        const SolverConfig& cfg) {
  if (static_cast<int>(frame_sources.size()) != fm.n_frames)
    throw std::invalid_argument("solve_adjoint: sources/frame map mismatch");
  if (fm.n_frames * fm.steps_per_frame != traj.n_steps())
    throw std::invalid_argument("solve_adjoint: frame map does not match trajectory");
  const Grid& g = traj.grid();
  const std::vector<int> fidx = frame_of_state(traj, fm);
  const int n = traj.n_steps();

  std::vector<AdjointState> psi(static_cast<size_t>(n) + 1, AdjointState(g));
  ConcentrationState cur(g);  // psi^{m+1} while stepping back
  if (fidx[static_cast<size_t>(n)] >= 0)
    inject(cur, frame_sources[static_cast<size_t>(fidx[static_cast<size_t>(n)])]);
  psi[static_cast<size_t>(n)] = to_adjoint(cur);

  for (int m = n - 1; m >= 0; --m) {
    detail::apply_reaction_transposed(cur, p, cfg.k0, cfg.tau);
    detail::apply_sweep_y_transposed(cur, p, bc, cfg.tau);
    detail::apply_sweep_x_transposed(cur, p, bc, cfg.tau);
    if (fidx[static_cast<size_t>(m)] >= 0)
      inject(cur, frame_sources[static_cast<size_t>(fidx[static_cast<size_t>(m)])]);
    psi[static_cast<size_t>(m)] = to_adjoint(cur);
  }
  return psi;
}

GradientSet assemble_gradient(const ParameterSet& p, const Trajectory& traj,
                              const std::vector<AdjointState>& adj, const BoundarySpec& bc,
                              const SolverConfig& cfg) {
  const Grid& g = traj.grid();
  if (static_cast<int>(adj.size()) != traj.n_steps() + 1)
    throw std::invalid_argument("assemble_gradient: adjoint/trajectory length mismatch");
  GradientSet grad(g);
  const double tau = cfg.tau;

  for (int m = 0; m < traj.n_steps(); ++m) {
    // forward intermediates of step m: after the x sweep and the y sweep
    ConcentrationState ca = traj.states[static_cast<size_t>(m)];
    detail::apply_sweep_x(ca, p, bc, tau);
    ConcentrationState cb = ca;
    detail::apply_sweep_y(cb, p, bc, tau);

    // multipliers of the three sub-steps, from psi^{m+1} backwards
    ConcentrationState lr = to_state(adj[static_cast<size_t>(m) + 1]);
    detail::apply_reaction_transposed(lr, p, cfg.k0, tau);
    ConcentrationState ly = lr;
    detail::apply_sweep_y_transposed(ly, p, bc, tau);
    ConcentrationState lx = ly;
    detail::apply_sweep_x_transposed(lx, p, bc, tau);

    // reaction block: d/dk of <lambda_r, tau*M C^{m+1}>
    const ConcentrationState& next = traj.states[static_cast<size_t>(m) + 1];
    for (int c = 0; c < g.cells(); ++c) {
      grad.k1[c] += tau * next.cA[c] * (lr.cT[c] - lr.cA[c]);
      grad.k2[c] += tau * next.cT[c] * (lr.cV[c] - lr.cT[c]);
      grad.k3[c] += tau * next.cV[c] * (lr.cA[c] - lr.cV[c]);
    }

    // transport blocks, per species and direction
    for (Species sp : all_species) {
      const ScalarField& D = species_diffusivity(p, sp);
      const VectorField& V = species_velocity(p, sp);
      ScalarField& gD = block_field(
          grad, sp == Species::A ? ParamBlock::DA
                                 : sp == Species::T ? ParamBlock::DT : ParamBlock::DV);
      ScalarField& gVx = block_field(
          grad, sp == Species::A ? ParamBlock::VAx
                                 : sp == Species::T ? ParamBlock::VTx : ParamBlock::VVx);
      ScalarField& gVy = block_field(
          grad, sp == Species::A ? ParamBlock::VAy
                                 : sp == Species::T ? ParamBlock::VTy : ParamBlock::VVy);
      accumulate_transport_x(D, V.x(), species_field(lx, sp), species_field(ca, sp), tau,
                             gD, gVx);
      accumulate_transport_y(D, V.y(), species_field(ly, sp), species_field(cb, sp), tau,
                             gD, gVy);
    }
  }
  return grad;
}

GradientSet assemble_gradient(const ParameterSet& p, const Trajectory& traj,
                              const std::vector<AdjointState>& adj, const BoundarySpec& bc,
                              const SolverConfig& cfg, const RegularizerConfig& reg,
                              double alpha) {
  GradientSet grad = assemble_gradient(p, traj, adj, bc, cfg);
  const GradientSet rg = regularizer_gradient(p, reg);
  for (ParamBlock b : all_param_blocks) {
    ScalarField& dst = block_field(grad, b);
    const ScalarField& src = block_field(rg, b);
    for (int c = 0; c < dst.size(); ++c) dst[c] += alpha * src[c];
  }
  return grad;
}

}  // namespace flowpet
