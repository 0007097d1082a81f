#include "flowpet/run_config.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace flowpet {

using nlohmann::json;

RunConfig::RunConfig() {
  for (ParamBlock b : all_param_blocks) {
    const ReferenceRegEntry e = reference_reg_entry(b);
    const int i = static_cast<int>(b);
    prior_value[i] = e.prior;
    reg_alpha[i] = e.alpha;
    reg_xi[i] = e.xi;
    step_scale[i] = 1.0;
  }
}

Edge edge_from_name(const std::string& name) {
  if (name == "left") return Edge::Left;
  if (name == "right") return Edge::Right;
  if (name == "bottom") return Edge::Bottom;
  if (name == "top") return Edge::Top;
  throw std::invalid_argument("unknown edge name: " + name);
}

std::string edge_name(Edge e) {
  switch (e) {
    case Edge::Left: return "left";
    case Edge::Right: return "right";
    case Edge::Bottom: return "bottom";
    case Edge::Top: return "top";
  }
  return "?";
}

namespace {

constexpr std::array<const char*, 3> kSpeciesNames = {"A", "T", "V"};

template <typename T>
void get_to(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

void get_blocks(const json& j, const char* key,
                std::array<double, kNumParamBlocks>& out) {
  if (!j.contains(key)) return;
  for (const auto& [name, value] : j.at(key).items())
    out[static_cast<int>(block_from_name(name))] = value.get<double>();
}

json blocks_to_json(const std::array<double, kNumParamBlocks>& a) {
  json j = json::object();
  for (ParamBlock b : all_param_blocks)
    j[std::string(block_name(b))] = a[static_cast<int>(b)];
  return j;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  json j;
  is >> j;

  RunConfig c;
  if (j.contains("grid")) {
    const json& g = j["grid"];
    get_to(g, "nx", c.nx);
    get_to(g, "ny", c.ny);
    get_to(g, "lx", c.lx);
    get_to(g, "ly", c.ly);
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    get_to(s, "tau", c.tau);
    get_to(s, "n_steps", c.n_steps);
    get_to(s, "k0", c.k0);
  }
  if (j.contains("initial")) {
    const json& s = j["initial"];
    get_to(s, "amplitude", c.amplitude);
    get_to(s, "n_param", c.n_param);
  }
  if (j.contains("boundary")) {
    const json& b = j["boundary"];
    get_to(b, "inflow_edge", c.inflow_edge);
    get_to(b, "j_in_profile", c.j_in_profile);
    if (b.contains("j_in"))
      for (int s = 0; s < 3; ++s) get_to(b["j_in"], kSpeciesNames[s], c.j_in[s]);
    if (b.contains("v_out")) {
      for (int s = 0; s < 3; ++s) {
        if (!b["v_out"].contains(kSpeciesNames[s])) continue;
        const json& per_edge = b["v_out"][kSpeciesNames[s]];
        for (const auto& [ename, value] : per_edge.items())
          c.v_out[s][static_cast<int>(edge_from_name(ename))] = value.get<double>();
      }
    }
  }
  if (j.contains("phantom")) {
    const json& p = j["phantom"];
    get_to(p, "preset", c.preset);
    get_to(p, "strip_fraction", c.strip_fraction);
    get_to(p, "block_fraction", c.block_fraction);
  }
  if (j.contains("projector")) {
    get_to(j["projector"], "n_angles", c.n_angles);
    get_to(j["projector"], "n_bins", c.n_bins);
  }
  if (j.contains("frames")) get_to(j["frames"], "count", c.n_frames);
  if (j.contains("noise")) {
    get_to(j["noise"], "scale", c.noise_scale);
    get_to(j["noise"], "seed", c.seed);
    get_to(j["noise"], "sample", c.sample);
  }
  if (j.contains("synth")) get_to(j["synth"], "refine", c.refine);
  if (j.contains("recon")) {
    const json& r = j["recon"];
    get_to(r, "alpha", c.alpha);
    get_to(r, "outer_iterations", c.outer_iterations);
    get_to(r, "inner_iterations", c.inner_iterations);
    get_to(r, "tau_inner", c.tau_inner);
    get_to(r, "eta_damp", c.eta_damp);
    get_blocks(r, "priors", c.prior_value);
    get_blocks(r, "reg_alpha", c.reg_alpha);
    get_blocks(r, "reg_xi", c.reg_xi);
    get_blocks(r, "step_scale", c.step_scale);
    if (r.contains("bounds")) {
      get_to(r["bounds"], "d_min", c.bounds.d_min);
      get_to(r["bounds"], "d_max", c.bounds.d_max);
      get_to(r["bounds"], "v_max", c.bounds.v_max);
      get_to(r["bounds"], "k_max", c.bounds.k_max);
    }
    get_to(r, "outer_tol", c.outer_tol);
    get_to(r, "checkpoint_every", c.checkpoint_every);
    get_to(r, "screened_tol", c.screened_tol);
  }
  if (j.contains("gradcheck")) {
    const json& g = j["gradcheck"];
    get_to(g, "cells_per_block", c.gc_cells_per_block);
    get_to(g, "eps", c.gc_eps);
    get_to(g, "tolerance", c.gc_tolerance);
    get_to(g, "modulation", c.gc_modulation);
  }
  if (j.contains("output")) {
    get_to(j["output"], "dir", c.output_dir);
    get_to(j["output"], "traj_stride", c.traj_stride);
  }
  get_to(j, "data_dir", c.data_dir);
  return c;
}

void write_run_config(const std::string& path, const RunConfig& c) {
  json j;
  j["grid"] = {{"nx", c.nx}, {"ny", c.ny}, {"lx", c.lx}, {"ly", c.ly}};
  j["solver"] = {{"tau", c.tau}, {"n_steps", c.n_steps}, {"k0", c.k0}};
  j["initial"] = {{"amplitude", c.amplitude}, {"n_param", c.n_param}};
  json vout = json::object();
  for (int s = 0; s < 3; ++s) {
    json per_edge = json::object();
    for (Edge e : all_edges)
      per_edge[edge_name(e)] = c.v_out[s][static_cast<int>(e)];
    vout[kSpeciesNames[s]] = per_edge;
  }
  j["boundary"] = {{"inflow_edge", c.inflow_edge},
                   {"j_in_profile", c.j_in_profile},
                   {"j_in",
                    {{"A", c.j_in[0]}, {"T", c.j_in[1]}, {"V", c.j_in[2]}}},
                   {"v_out", vout}};
  j["phantom"] = {{"preset", c.preset},
                  {"strip_fraction", c.strip_fraction},
                  {"block_fraction", c.block_fraction}};
  j["projector"] = {{"n_angles", c.n_angles}, {"n_bins", c.n_bins}};
  j["frames"] = {{"count", c.n_frames}};
  j["noise"] = {{"scale", c.noise_scale}, {"seed", c.seed}, {"sample", c.sample}};
  j["synth"] = {{"refine", c.refine}};
  j["recon"] = {{"alpha", c.alpha},
                {"outer_iterations", c.outer_iterations},
                {"inner_iterations", c.inner_iterations},
                {"tau_inner", c.tau_inner},
                {"eta_damp", c.eta_damp},
                {"priors", blocks_to_json(c.prior_value)},
                {"reg_alpha", blocks_to_json(c.reg_alpha)},
                {"reg_xi", blocks_to_json(c.reg_xi)},
                {"step_scale", blocks_to_json(c.step_scale)},
                {"bounds",
                 {{"d_min", c.bounds.d_min},
                  {"d_max", c.bounds.d_max},
                  {"v_max", c.bounds.v_max},
                  {"k_max", c.bounds.k_max}}},
                {"outer_tol", c.outer_tol},
                {"checkpoint_every", c.checkpoint_every},
                {"screened_tol", c.screened_tol}};
  j["gradcheck"] = {{"cells_per_block", c.gc_cells_per_block},
                    {"eps", c.gc_eps},
                    {"tolerance", c.gc_tolerance},
                    {"modulation", c.gc_modulation}};
  j["output"] = {{"dir", c.output_dir}, {"traj_stride", c.traj_stride}};
  j["data_dir"] = c.data_dir;

  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write config: " + path);
  os << j.dump(2) << '\n';
}

Grid make_grid(const RunConfig& c) { return build_grid(c.nx, c.ny, c.lx, c.ly); }

SolverConfig make_solver_config(const RunConfig& c) {
  if (!(c.tau > 0.0) || c.n_steps < 1 || !(c.k0 >= 0.0))
    throw std::invalid_argument("config: solver needs tau > 0, n_steps >= 1, k0 >= 0");
  return SolverConfig{c.tau, c.n_steps, c.k0};
}

BoundarySpec make_boundary(const RunConfig& c, const Grid& g) {
  BoundarySpec bc;
  const Edge in = edge_from_name(c.inflow_edge);
  bc.mark_inflow(in);
  const int n = edge_length(g, in);
  for (int s = 0; s < 3; ++s) {
    std::vector<double> prof(static_cast<size_t>(n), c.j_in[s]);
    if (c.j_in_profile == "parabolic") {
      for (int m = 0; m < n; ++m) {
        const double x1 = -1.0 + 2.0 * (m + 0.5) / n;
        prof[static_cast<size_t>(m)] = c.j_in[s] * (1.0 - x1 * x1);
      }
    } else if (c.j_in_profile != "uniform") {
      throw std::invalid_argument("config: j_in_profile must be uniform or parabolic");
    }
    bc.edge(in).j_in[s] = std::move(prof);
  }
  for (Edge e : all_edges)
    for (int s = 0; s < 3; ++s) {
      const double v = c.v_out[s][static_cast<int>(e)];
      if (v != 0.0) bc.set_uniform_v_out(g, e, static_cast<Species>(s), v);
    }
  bc.validate(g);
  return bc;
}

ConcentrationState make_initial(const RunConfig& c, const Grid& g) {
  const double amp = c.amplitude < 0.0 ? c.tau : c.amplitude;
  return initial_condition(g, amp, c.n_param);
}

PhantomOptions make_phantom_options(const RunConfig& c) {
  return PhantomOptions{c.strip_fraction, c.block_fraction, edge_from_name(c.inflow_edge)};
}

ReconConfig make_recon_config(const RunConfig& c, const Grid& g) {
  ReconConfig rc;
  rc.alpha = c.alpha;
  rc.reg.prior = ParameterSet(g);
  for (ParamBlock b : all_param_blocks) {
    const int i = static_cast<int>(b);
    ScalarField& f = block_field(rc.reg.prior, b);
    std::fill(f.values().begin(), f.values().end(), c.prior_value[i]);
    rc.reg.alpha[i] = c.reg_alpha[i];
    rc.reg.xi[i] = c.reg_xi[i];
    rc.step_scale[i] = c.step_scale[i];
  }
  rc.bounds = c.bounds;
  rc.outer_iterations = c.outer_iterations;
  rc.inner_iterations = c.inner_iterations;
  rc.tau_inner = c.tau_inner;
  rc.eta_damp = c.eta_damp;
  rc.outer_tol = c.outer_tol;
  rc.screened.tol = c.screened_tol;
  return rc;
}

}  // namespace flowpet
