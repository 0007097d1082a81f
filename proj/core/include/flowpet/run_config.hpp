#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "flowpet/phantom.hpp"
#include "flowpet/recon.hpp"

namespace flowpet {

/// Fully resolved run configuration: every field has a working default,
/// a JSON file overrides what it names. The same structure drives all
/// CLI commands.
struct RunConfig {
  // grid
  int nx = 16, ny = 16;
  double lx = 1.0, ly = 1.0;
  // time stepping
  double tau = 3e-5;
  int n_steps = 140;
  double k0 = 0.0;
  // initial bolus; amplitude < 0 means "use tau"
  double amplitude = -1.0;
  double n_param = 50.0;
  // boundary: one inflow edge, per-species inflow magnitude and profile,
  // per-species per-edge outflow speeds
  std::string inflow_edge = "bottom";
  std::array<double, 3> j_in = {1.0, 0.0, 0.0};  // A, T, V
  std::string j_in_profile = "parabolic";        // or "uniform"
  std::array<std::array<double, 4>, 3> v_out{};  // [species][edge], cm/s
  // phantom
  std::string preset = "constant";
  double strip_fraction = 0.1;
  double block_fraction = 0.2;
  // projector
  int n_angles = 24, n_bins = 23;
  // time frames
  int n_frames = 20;
  // counts
  double noise_scale = 1.0;
  std::uint64_t seed = 20260809ULL;
  bool sample = true;  // false: keep noiseless expectations
  // synthetic-data grid refinement
  int refine = 2;
  // reconstruction
  double alpha = 1e-2;
  int outer_iterations = 50;
  int inner_iterations = 2;
  double tau_inner = 1.0;
  double eta_damp = 1.0;
  std::array<double, kNumParamBlocks> prior_value{};  // defaults: reference preset
  std::array<double, kNumParamBlocks> reg_alpha{};
  std::array<double, kNumParamBlocks> reg_xi{};
  std::array<double, kNumParamBlocks> step_scale{};
  Bounds bounds{};
  double outer_tol = 1e-6;
  int checkpoint_every = 10;
  double screened_tol = 1e-13;
  // gradient check
  int gc_cells_per_block = 3;
  std::vector<double> gc_eps = {1e-4, 1e-5, 1e-6};
  double gc_tolerance = 1e-6;
  double gc_modulation = 0.05;
  // io
  std::string output_dir = "out";
  std::string data_dir;  // reconstruct input; empty means output_dir
  int traj_stride = 1;   // write every n-th time level in simulate

  RunConfig();  // fills the per-block arrays from the reference preset
};

RunConfig load_run_config(const std::string& path);
/// Writes the fully resolved configuration (the echo re-runs bitwise).
void write_run_config(const std::string& path, const RunConfig& cfg);

Edge edge_from_name(const std::string& name);
std::string edge_name(Edge e);

// builders from the resolved configuration
Grid make_grid(const RunConfig& cfg);
SolverConfig make_solver_config(const RunConfig& cfg);
BoundarySpec make_boundary(const RunConfig& cfg, const Grid& g);
ConcentrationState make_initial(const RunConfig& cfg, const Grid& g);
PhantomOptions make_phantom_options(const RunConfig& cfg);
ReconConfig make_recon_config(const RunConfig& cfg, const Grid& g);

}  // namespace flowpet
