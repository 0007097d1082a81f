#include "flowpet/forward.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "flowpet/tridiag.hpp"

namespace flowpet {

void BoundarySpec::set_uniform_j_in(const Grid& g, Edge e, Species s, double value) {
  edge(e).j_in[static_cast<int>(s)].assign(static_cast<size_t>(edge_length(g, e)), value);
}

void BoundarySpec::set_uniform_v_out(const Grid& g, Edge e, Species s, double value) {
  edge(e).v_out[static_cast<int>(s)].assign(static_cast<size_t>(edge_length(g, e)), value);
}

void BoundarySpec::validate(const Grid& g) const {
  for (Edge e : all_edges) {
    const EdgeCondition& ec = edge(e);
    const size_t n = static_cast<size_t>(edge_length(g, e));
    if (!ec.inflow_mask.empty() && ec.inflow_mask.size() != n)
      throw std::invalid_argument("BoundarySpec: inflow mask length mismatch");
    for (int s = 0; s < 3; ++s) {
      if (!ec.j_in[s].empty()) {
        if (ec.j_in[s].size() != n)
          throw std::invalid_argument("BoundarySpec: j_in length mismatch");
        for (double v : ec.j_in[s])
          if (!(v >= 0.0)) throw std::invalid_argument("BoundarySpec: j_in must be >= 0");
      }
      if (!ec.v_out[s].empty()) {
        if (ec.v_out[s].size() != n)
          throw std::invalid_argument("BoundarySpec: v_out length mismatch");
        for (double v : ec.v_out[s])
          if (!(v >= 0.0)) throw std::invalid_argument("BoundarySpec: v_out must be >= 0");
      }
    }
  }
}

ScalarField& species_field(ConcentrationState& s, Species sp) {
  switch (sp) {
    case Species::A: return s.cA;
    case Species::T: return s.cT;
    case Species::V: return s.cV;
  }
  throw std::logic_error("species_field: bad species");
}

const ScalarField& species_field(const ConcentrationState& s, Species sp) {
  return species_field(const_cast<ConcentrationState&>(s), sp);
}

const ScalarField& species_diffusivity(const ParameterSet& p, Species sp) {
  switch (sp) {
    case Species::A: return p.dA;
    case Species::T: return p.dT;
    case Species::V: return p.dV;
  }
  throw std::logic_error("species_diffusivity: bad species");
}

const VectorField& species_velocity(const ParameterSet& p, Species sp) {
  switch (sp) {
    case Species::A: return p.vA;
    case Species::T: return p.vT;
    case Species::V: return p.vV;
  }
  throw std::logic_error("species_velocity: bad species");
}

void StepStats::merge(const StepStats& o) {
  clamped_cells += o.clamped_cells;
  breach_cells += o.breach_cells;
  worst_negative = std::min(worst_negative, o.worst_negative);
}

ConcentrationState initial_condition(const Grid& g, double amplitude, double n_param) {
  if (!(amplitude >= 0.0)) throw std::invalid_argument("initial_condition: amplitude < 0");
  ConcentrationState s(g);
  for (int j = 0; j < g.ny; ++j) {
    const double x2 = n_param * (j + 0.5) / g.ny;
    for (int i = 0; i < g.nx; ++i) {
      const double x1 = -1.0 + 2.0 * (i + 0.5) / g.nx;
      const double v = amplitude * (1.0 - x1 * x1) * (n_param - x2) * x2;
      s.cA.at(i, j) = std::max(v, 0.0);
    }
  }
  return s;
}

double bernoulli(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - 0.5 * x + x * x / 12.0;
  return x / std::expm1(x);  // handles overflow: x/inf -> 0, expm1(-inf) -> -1
}

double bernoulli_deriv(double x) {
  if (std::abs(x) < 1e-4) return -0.5 + x / 6.0 - x * x * x / 180.0;
  const double b = bernoulli(x);
  return b * (1.0 - b - x) / x;
}

std::pair<double, double> sg_face_coefficients(double d_face, double v_face, double h) {
  if (d_face > 0.0) {
    const double xi = v_face * h / d_face;
    return {d_face / h * bernoulli(-xi), d_face / h * bernoulli(xi)};
  }
  if (d_face == 0.0)  // pure-advection upwind limit
    return {std::max(v_face, 0.0), std::max(-v_face, 0.0)};
  throw std::invalid_argument("sg_face_coefficients: negative diffusivity");
}

namespace detail {

// Interior face between cells l (left) and r (right): flux
// G_f = bm*C_r - bp*C_l feeding dC_l/dt += G_f/h, dC_r/dt -= G_f/h.
// Implicit in time: row l gains (tau/h)*bp on the diagonal and
// -(tau/h)*bm towards C_r; row r the mirror image.
void assemble_line_x(const ScalarField& D, const ScalarField& Vx, const BoundarySpec& bc,
                     Species sp, double tau, int j, LineSystem& sys) {
  const Grid& g = D.grid();
  const int n = g.nx;
  const double ih = 1.0 / g.hx;
  sys.resize(static_cast<size_t>(n));
  for (int i = 0; i + 1 < n; ++i) {
    const double d_f = 0.5 * (D.at(i, j) + D.at(i + 1, j));
    const double v_f = 0.5 * (Vx.at(i, j) + Vx.at(i + 1, j));
    const auto [bm, bp] = sg_face_coefficients(d_f, v_f, g.hx);
    sys.diag[i] += tau * ih * bp;
    sys.upper[i] -= tau * ih * bm;
    sys.diag[i + 1] += tau * ih * bm;
    sys.lower[i + 1] -= tau * ih * bp;
  }
  if (bc.is_inflow_at(Edge::Left, j))
    sys.src[0] += bc.j_in_at(Edge::Left, sp, j) * ih;
  else
    sys.diag[0] += tau * ih * bc.v_out_at(Edge::Left, sp, j);
  if (bc.is_inflow_at(Edge::Right, j))
    sys.src[static_cast<size_t>(n - 1)] += bc.j_in_at(Edge::Right, sp, j) * ih;
  else
    sys.diag[static_cast<size_t>(n - 1)] += tau * ih * bc.v_out_at(Edge::Right, sp, j);
}

void assemble_line_y(const ScalarField& D, const ScalarField& Vy, const BoundarySpec& bc,
                     Species sp, double tau, int i, LineSystem& sys) {
  const Grid& g = D.grid();
  const int n = g.ny;
  const double ih = 1.0 / g.hy;
  sys.resize(static_cast<size_t>(n));
  for (int j = 0; j + 1 < n; ++j) {
    const double d_f = 0.5 * (D.at(i, j) + D.at(i, j + 1));
    const double v_f = 0.5 * (Vy.at(i, j) + Vy.at(i, j + 1));
    const auto [bm, bp] = sg_face_coefficients(d_f, v_f, g.hy);
    sys.diag[j] += tau * ih * bp;
    sys.upper[j] -= tau * ih * bm;
    sys.diag[j + 1] += tau * ih * bm;
    sys.lower[j + 1] -= tau * ih * bp;
  }
  if (bc.is_inflow_at(Edge::Bottom, i))
    sys.src[0] += bc.j_in_at(Edge::Bottom, sp, i) * ih;
  else
    sys.diag[0] += tau * ih * bc.v_out_at(Edge::Bottom, sp, i);
  if (bc.is_inflow_at(Edge::Top, i))
    sys.src[static_cast<size_t>(n - 1)] += bc.j_in_at(Edge::Top, sp, i) * ih;
  else
    sys.diag[static_cast<size_t>(n - 1)] += tau * ih * bc.v_out_at(Edge::Top, sp, i);
}

// (I - tau*M) in the (A,V,T) ordering:
//   [ 1+tau*(k0+k1)   -tau*k3          0             ]
//   [ 0               1+tau*(k0+k3)   -tau*k2        ]
//   [ -tau*k1         0               1+tau*(k0+k2)  ]
// Column sums are 1 + tau*k0, which is what makes the reaction step
// conservative up to decay. Solved exactly by elimination along the cycle.
void reaction_solve(double k1, double k2, double k3, double k0, double tau,
                    double& a, double& v, double& t) {
  const double dA = 1.0 + tau * (k0 + k1);
  const double dV = 1.0 + tau * (k0 + k3);
  const double dT = 1.0 + tau * (k0 + k2);
  const double cyc = tau * tau * tau * k1 * k2 * k3 / (dV * dT);
  const double A = (a + tau * k3 * v / dV + tau * tau * k3 * k2 * t / (dV * dT)) / (dA - cyc);
  const double T = (t + tau * k1 * A) / dT;
  const double V = (v + tau * k2 * T) / dV;
  a = A;
  v = V;
  t = T;
}

void reaction_solve_transposed(double k1, double k2, double k3, double k0, double tau,
                               double& a, double& v, double& t) {
  const double dA = 1.0 + tau * (k0 + k1);
  const double dV = 1.0 + tau * (k0 + k3);
  const double dT = 1.0 + tau * (k0 + k2);
  const double cyc = tau * tau * tau * k1 * k2 * k3 / (dA * dV);
  const double T = (t + tau * k2 * v / dV + tau * tau * k2 * k3 * a / (dA * dV)) / (dT - cyc);
  const double A = (a + tau * k1 * T) / dA;
  const double V = (v + tau * k3 * A) / dV;
  a = A;
  v = V;
  t = T;
}

void apply_sweep_x(ConcentrationState& s, const ParameterSet& p, const BoundarySpec& bc,
                   double tau) {
  const Grid& g = s.grid();
  LineSystem sys;
  std::vector<double> rhs(static_cast<size_t>(g.nx)), scratch(static_cast<size_t>(g.nx));
  for (Species sp : all_species) {
    const ScalarField& D = species_diffusivity(p, sp);
    const ScalarField& Vx = species_velocity(p, sp).x();
    ScalarField& c = species_field(s, sp);
    for (int j = 0; j < g.ny; ++j) {
      assemble_line_x(D, Vx, bc, sp, tau, j, sys);
      for (int i = 0; i < g.nx; ++i)
        rhs[static_cast<size_t>(i)] = c.at(i, j) + tau * sys.src[static_cast<size_t>(i)];
      solve_tridiag(sys.lower, sys.diag, sys.upper, rhs, scratch);
      for (int i = 0; i < g.nx; ++i) c.at(i, j) = rhs[static_cast<size_t>(i)];
    }
  }
}

void apply_sweep_y(ConcentrationState& s, const ParameterSet& p, const BoundarySpec& bc,
                   double tau) {
  const Grid& g = s.grid();
  LineSystem sys;
  std::vector<double> rhs(static_cast<size_t>(g.ny)), scratch(static_cast<size_t>(g.ny));
  for (Species sp : all_species) {
    const ScalarField& D = species_diffusivity(p, sp);
    const ScalarField& Vy = species_velocity(p, sp).y();
    ScalarField& c = species_field(s, sp);
    for (int i = 0; i < g.nx; ++i) {
      assemble_line_y(D, Vy, bc, sp, tau, i, sys);
      for (int j = 0; j < g.ny; ++j)
        rhs[static_cast<size_t>(j)] = c.at(i, j) + tau * sys.src[static_cast<size_t>(j)];
      solve_tridiag(sys.lower, sys.diag, sys.upper, rhs, scratch);
      for (int j = 0; j < g.ny; ++j) c.at(i, j) = rhs[static_cast<size_t>(j)];
    }
  }
}

void apply_sweep_x_transposed(ConcentrationState& s, const ParameterSet& p,
                              const BoundarySpec& bc, double tau) {
  const Grid& g = s.grid();
  LineSystem sys;
  const size_t n = static_cast<size_t>(g.nx);
  std::vector<double> rhs(n), scratch(n), lo(n), up(n);
  for (Species sp : all_species) {
    const ScalarField& D = species_diffusivity(p, sp);
    const ScalarField& Vx = species_velocity(p, sp).x();
    ScalarField& c = species_field(s, sp);
    for (int j = 0; j < g.ny; ++j) {
      assemble_line_x(D, Vx, bc, sp, tau, j, sys);
      for (int i = 0; i < g.nx; ++i) rhs[static_cast<size_t>(i)] = c.at(i, j);
      solve_tridiag_transposed(sys.lower, sys.diag, sys.upper, rhs, lo, up, scratch);
      for (int i = 0; i < g.nx; ++i) c.at(i, j) = rhs[static_cast<size_t>(i)];
    }
  }
}

void apply_sweep_y_transposed(ConcentrationState& s, const ParameterSet& p,
                              const BoundarySpec& bc, double tau) {
  const Grid& g = s.grid();
  LineSystem sys;
  const size_t n = static_cast<size_t>(g.ny);
  std::vector<double> rhs(n), scratch(n), lo(n), up(n);
  for (Species sp : all_species) {
    const ScalarField& D = species_diffusivity(p, sp);
    const ScalarField& Vy = species_velocity(p, sp).y();
    ScalarField& c = species_field(s, sp);
    for (int i = 0; i < g.nx; ++i) {
      assemble_line_y(D, Vy, bc, sp, tau, i, sys);
      for (int j = 0; j < g.ny; ++j) rhs[static_cast<size_t>(j)] = c.at(i, j);
      solve_tridiag_transposed(sys.lower, sys.diag, sys.upper, rhs, lo, up, scratch);
      for (int j = 0; j < g.ny; ++j) c.at(i, j) = rhs[static_cast<size_t>(j)];
    }
  }
}

void apply_reaction(ConcentrationState& s, const ParameterSet& p, double k0, double tau) {
  const int n = s.grid().cells();
  for (int c = 0; c < n; ++c) {
    double a = s.cA[c], v = s.cV[c], t = s.cT[c];
    reaction_solve(p.k1[c], p.k2[c], p.k3[c], k0, tau, a, v, t);
    s.cA[c] = a;
    s.cV[c] = v;
    s.cT[c] = t;
  }
}

void apply_reaction_transposed(ConcentrationState& s, const ParameterSet& p, double k0,
                               double tau) {
  const int n = s.grid().cells();
  for (int c = 0; c < n; ++c) {
    double a = s.cA[c], v = s.cV[c], t = s.cT[c];
    reaction_solve_transposed(p.k1[c], p.k2[c], p.k3[c], k0, tau, a, v, t);
    s.cA[c] = a;
    s.cV[c] = v;
    s.cT[c] = t;
  }
}

}  // namespace detail

namespace {

void clamp_negatives(ConcentrationState& s, StepStats& st) {
  for (ScalarField* f : {&s.cA, &s.cT, &s.cV}) {
    for (double& x : f->values()) {
      if (x < 0.0) {
        st.worst_negative = std::min(st.worst_negative, x);
        ++st.clamped_cells;
        if (x < -1e-12) ++st.breach_cells;
        x = 0.0;
      }
    }
  }
}

}  // namespace

ConcentrationState adi_step(const ConcentrationState& state, const ParameterSet& p,
                            const BoundarySpec& bc, const SolverConfig& cfg,
                            StepStats* stats) {
  if (!(state.grid() == p.grid()))
    throw std::invalid_argument("adi_step: state/parameter grid mismatch");
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("adi_step: tau must be positive");
  ConcentrationState out = state;
  detail::apply_sweep_x(out, p, bc, cfg.tau);
  detail::apply_sweep_y(out, p, bc, cfg.tau);
  detail::apply_reaction(out, p, cfg.k0, cfg.tau);
  StepStats st;
  clamp_negatives(out, st);
  if (stats) stats->merge(st);
  out.time = state.time + cfg.tau;
  return out;
}

Trajectory solve_forward(const ParameterSet& p, const ConcentrationState& c0,
                         const BoundarySpec& bc, const SolverConfig& cfg) {
  if (cfg.n_steps < 1) throw std::invalid_argument("solve_forward: n_steps must be >= 1");
  bc.validate(p.grid());
  Trajectory traj;
  traj.tau = cfg.tau;
  traj.states.reserve(static_cast<size_t>(cfg.n_steps) + 1);
  traj.states.push_back(c0);
  for (int k = 0; k < cfg.n_steps; ++k)
    traj.states.push_back(adi_step(traj.states.back(), p, bc, cfg, &traj.stats));
  return traj;
}

ScalarField activity(const ConcentrationState& s) {
  ScalarField u = s.cA;
  u += s.cT;
  u += s.cV;
  return u;
}

std::vector<ScalarField> activity(const Trajectory& traj) {
  std::vector<ScalarField> out;
  out.reserve(traj.states.size());
  for (const ConcentrationState& s : traj.states) out.push_back(activity(s));
  return out;
}

FrameMap FrameMap::uniform(int n_steps, int n_frames) {
  if (n_frames < 1 || n_steps < 1 || n_steps % n_frames != 0)
    throw std::invalid_argument("FrameMap: n_steps must be a positive multiple of n_frames");
  return FrameMap{n_frames, n_steps / n_frames};
}

std::vector<ScalarField> frame_activity(const Trajectory& traj, const FrameMap& fm) {
  if (fm.n_frames * fm.steps_per_frame != traj.n_steps())
    throw std::invalid_argument("frame_activity: frame map does not match trajectory");
  std::vector<ScalarField> out;
  out.reserve(static_cast<size_t>(fm.n_frames));
  for (int f = 0; f < fm.n_frames; ++f)
    out.push_back(activity(traj.states[static_cast<size_t>(fm.state_index(f))]));
  return out;
}

}  // namespace flowpet
