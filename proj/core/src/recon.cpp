#include "flowpet/recon.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace flowpet {

namespace {

double rel_param_change(const ParameterSet& a, const ParameterSet& b) {
  double num = 0.0, den = 0.0;
  for (ParamBlock blk : all_param_blocks) {
    const ScalarField& fa = block_field(a, blk);
    const ScalarField& fb = block_field(b, blk);
    for (int c = 0; c < fa.size(); ++c) {
      const double d = fa[c] - fb[c];
      num += d * d;
      den += fb[c] * fb[c];
    }
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

// backward step on the regularizer: per block solve
// (1 + 2*alpha*a_i*tau*area - 2*alpha*xi_i*tau*area*lap) q = p - tau*g + 2*alpha*a_i*tau*area*p*
ParameterSet prox_update(const ParameterSet& p, const GradientSet& g_data, double tau_eff,
                         const ReconConfig& cfg) {
  const double area = p.grid().cell_area();
  ParameterSet q(p.grid());
  for (ParamBlock b : all_param_blocks) {
    const double tau_b = tau_eff * cfg.step_scale[static_cast<int>(b)];
    const double c = 1.0 + 2.0 * cfg.alpha * cfg.reg.alpha_of(b) * tau_b * area;
    const double zeta = 2.0 * cfg.alpha * cfg.reg.xi_of(b) * tau_b * area;
    const ScalarField& pf = block_field(p, b);
    const ScalarField& gf = block_field(g_data, b);
    const ScalarField& prior = block_field(cfg.reg.prior, b);
    ScalarField rhs(p.grid());
    for (int k = 0; k < rhs.size(); ++k)
      rhs[k] = pf[k] - tau_b * gf[k] + (c - 1.0) * prior[k];
    block_field(q, b) = screened_poisson_solve(rhs, c, zeta, cfg.screened);
  }
  return q;
}

std::vector<ScalarField> scaled_sources(const std::vector<ScalarField>& w,
                                        double frame_duration, double area) {
  std::vector<ScalarField> src = w;
  for (ScalarField& f : src) f *= frame_duration * area;
  return src;
}

}  // namespace

double weighted_misfit(const std::vector<ScalarField>& u,
                       const std::vector<ScalarField>& u_half,
                       const std::vector<ScalarField>& u_outer, const ScalarField& sens,
                       double frame_duration, double eps_w) {
  if (u.size() != u_half.size() || u.size() != u_outer.size())
    throw std::invalid_argument("weighted_misfit: frame count mismatch");
  const double area = sens.grid().cell_area();
  double acc = 0.0;
  for (size_t f = 0; f < u.size(); ++f) {
    for (int c = 0; c < sens.size(); ++c) {
      const double omega = sens[c] / std::max(u_outer[f][c], eps_w);
      const double r = u[f][c] - u_half[f][c];
      acc += omega * r * r;
    }
  }
  return 0.5 * frame_duration * area * acc;
}

HalfStepResult parameter_half_step(const ParameterSet& p_k,
                                   const std::vector<ScalarField>& u_half,
                                   const std::vector<ScalarField>& u_outer,
                                   const ScalarField& sens, const ModelContext& mc,
                                   const ReconConfig& cfg) {
  const double dt = mc.frames.frame_duration(mc.solver.tau);
  const double area = p_k.grid().cell_area();

  HalfStepResult res;
  res.p = p_k;
  res.traj = solve_forward(p_k, mc.c0, mc.bc, mc.solver);
  res.u = frame_activity(res.traj, mc.frames);
  res.misfit = weighted_misfit(res.u, u_half, u_outer, sens, dt, cfg.eps_w);
  res.breach_cells += res.traj.stats.breach_cells;
  // the safeguard watches the full inner objective, misfit + alpha*R
  double inner_obj = res.misfit + cfg.alpha * regularizer_value(res.p, cfg.reg);

  // backtracking step control with warm start: each inner iteration
  // starts from the previously accepted step (allowed to regrow towards
  // the configured ceiling) and halves until the inner objective stops
  // increasing
  const double tau_max = cfg.tau_inner / cfg.eta_damp;
  double tau_try = tau_max;
  for (int n = 0; n < cfg.inner_iterations; ++n) {
    const std::vector<ScalarField> w =
        residual_weight(res.u, u_half, u_outer, sens, cfg.eps_w);
    const std::vector<AdjointState> psi = solve_adjoint(
        res.p, res.traj, scaled_sources(w, dt, area), mc.frames, mc.bc, mc.solver);
    const GradientSet g_data = assemble_gradient(res.p, res.traj, psi, mc.bc, mc.solver);

    bool accepted = false;
    double tau_eff = tau_try;
    for (int attempt = 0; attempt <= cfg.max_step_halvings; ++attempt) {
      ParameterSet p_try =
          project_parameters(prox_update(res.p, g_data, tau_eff, cfg), cfg.bounds);
      Trajectory traj_try = solve_forward(p_try, mc.c0, mc.bc, mc.solver);
      std::vector<ScalarField> u_try = frame_activity(traj_try, mc.frames);
      const double m_try = weighted_misfit(u_try, u_half, u_outer, sens, dt, cfg.eps_w);
      const double obj_try = m_try + cfg.alpha * regularizer_value(p_try, cfg.reg);
      if (obj_try <= inner_obj * (1.0 + 1e-12) + 1e-300) {
        const double change = rel_param_change(p_try, res.p);
        res.p = std::move(p_try);
        res.traj = std::move(traj_try);
        res.u = std::move(u_try);
        res.misfit = m_try;
        inner_obj = obj_try;
        res.breach_cells += res.traj.stats.breach_cells;
        accepted = true;
        tau_try = std::min(2.0 * tau_eff, tau_max);
        break;
      }
      tau_eff *= 0.5;
      ++res.halvings;
    }
    if (!accepted) break;  // step exhausted, keep the last feasible iterate
    if (cfg.inner_tol > 0.0 && rel_param_change(res.p, p_k) < cfg.inner_tol) break;
  }
  return res;
}

double objective(const ParameterSet& p, const SinogramSequence& f, const Projector& K,
                 const ModelContext& mc, const ReconConfig& cfg, ObjectiveParts* parts) {
  const Trajectory traj = solve_forward(p, mc.c0, mc.bc, mc.solver);
  const std::vector<ScalarField> u = frame_activity(traj, mc.frames);
  SinogramSequence expected;
  expected.frame_duration = mc.frames.frame_duration(mc.solver.tau);
  for (const ScalarField& uf : u) expected.frames.push_back(project(K, uf));
  ObjectiveParts pt;
  pt.data = kl_fidelity(expected, f);
  pt.reg = regularizer_value(p, cfg.reg);
  pt.total = pt.data + cfg.alpha * pt.reg;
  if (parts) *parts = pt;
  return pt.total;
}

double objective_gap(const ParameterSet& p, const SinogramSequence& f, const Projector& K,
                     const ModelContext& mc, const ReconConfig& cfg) {
  const Trajectory traj = solve_forward(p, mc.c0, mc.bc, mc.solver);
  const std::vector<ScalarField> u = frame_activity(traj, mc.frames);
  SinogramSequence expected;
  expected.frame_duration = mc.frames.frame_duration(mc.solver.tau);
  for (const ScalarField& uf : u) expected.frames.push_back(project(K, uf));
  return kl_fidelity_bregman(expected, f) + cfg.alpha * regularizer_value(p, cfg.reg);
}

GradientSet objective_gradient(const ParameterSet& p, const SinogramSequence& f,
                               const Projector& K, const ModelContext& mc,
                               const ReconConfig& cfg, ObjectiveParts* parts) {
  const Trajectory traj = solve_forward(p, mc.c0, mc.bc, mc.solver);
  const std::vector<ScalarField> u = frame_activity(traj, mc.frames);
  const double dt = mc.frames.frame_duration(mc.solver.tau);

  SinogramSequence expected;
  expected.frame_duration = dt;
  for (const ScalarField& uf : u) expected.frames.push_back(project(K, uf));

  std::vector<ScalarField> sources;
  sources.reserve(u.size());
  for (size_t t = 0; t < u.size(); ++t)
    sources.push_back(backproject(
        K, kl_fidelity_gradient_frame(expected.frames[t], f.frames[t], dt)));

  const std::vector<AdjointState> psi =
      solve_adjoint(p, traj, sources, mc.frames, mc.bc, mc.solver);
  GradientSet grad = assemble_gradient(p, traj, psi, mc.bc, mc.solver, cfg.reg, cfg.alpha);

  if (parts) {
    parts->data = kl_fidelity(expected, f);
    parts->reg = regularizer_value(p, cfg.reg);
    parts->total = parts->data + cfg.alpha * parts->reg;
  }
  return grad;
}

std::pair<ParameterSet, ReconReport> reconstruct(const SinogramSequence& f,
                                                 const Projector& K, const ModelContext& mc,
                                                 const ReconConfig& cfg,
                                                 const IterationCallback& on_iteration) {
  using clock = std::chrono::steady_clock;
  if (f.n_frames() != mc.frames.n_frames)
    throw std::invalid_argument("reconstruct: data frames do not match the frame map");
  mc.bc.validate(K.grid);

  ReconReport report;
  ParameterSet p = project_parameters(cfg.reg.prior, cfg.bounds);
  const ScalarField& sens = K.sens;

  Trajectory traj = solve_forward(p, mc.c0, mc.bc, mc.solver);
  std::vector<ScalarField> u_outer = frame_activity(traj, mc.frames);

  for (int outer = 1; outer <= cfg.outer_iterations; ++outer) {
    const auto t0 = clock::now();

    EmStats em{};
    const std::vector<ScalarField> u_half =
        em_half_step(u_outer, K, f, &em, cfg.eps_em);
    report.em_floored_bins += em.floored_bins;

    HalfStepResult hs = parameter_half_step(p, u_half, u_outer, sens, mc, cfg);
    report.step_halvings += hs.halvings;

    SinogramSequence expected;
    expected.frame_duration = mc.frames.frame_duration(mc.solver.tau);
    for (const ScalarField& uf : hs.u) expected.frames.push_back(project(K, uf));

    ReconReport::Row row;
    row.outer = outer;
    row.data_term = kl_fidelity(expected, f);
    row.reg_value = regularizer_value(hs.p, cfg.reg);
    row.objective = row.data_term + cfg.alpha * row.reg_value;
    row.param_change = rel_param_change(hs.p, p);
    row.negative_cells = hs.breach_cells;
    row.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    report.rows.push_back(row);

    p = std::move(hs.p);
    u_outer = std::move(hs.u);

    if (on_iteration) on_iteration(outer, p, report);
    if (!std::isfinite(row.objective))
      throw std::runtime_error("reconstruct: non-finite objective at outer iteration " +
                               std::to_string(outer));
    if (row.param_change < cfg.outer_tol) {
      report.converged = true;
      break;
    }
  }
  return {std::move(p), std::move(report)};
}

}  // namespace flowpet
