#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "flowpet/field_io.hpp"
#include "flowpet/pipeline.hpp"

using namespace flowpet;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "flowpet_cli_test" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

RunConfig tiny_config() {
  RunConfig cfg;
  cfg.nx = cfg.ny = 8;
  cfg.tau = 1e-3;
  cfg.n_steps = 20;
  cfg.n_frames = 5;
  cfg.n_angles = 6;
  cfg.n_bins = 9;
  cfg.refine = 2;
  cfg.amplitude = 1.0;
  cfg.j_in = {50.0, 0.0, 0.0};
  cfg.v_out[0][static_cast<int>(Edge::Top)] = 700.0;
  cfg.v_out[1][static_cast<int>(Edge::Left)] = 50.0;
  cfg.v_out[2][static_cast<int>(Edge::Top)] = 700.0;
  cfg.noise_scale = 1e-2;
  cfg.outer_iterations = 2;
  cfg.inner_iterations = 1;
  cfg.tau_inner = 1e-6;
  cfg.checkpoint_every = 1;
  return cfg;
}

}  // namespace

TEST_CASE("phantom presets carry the reference values") {
  const Grid g = build_grid(16, 16, 1.0, 1.0);
  const ParameterSet c = phantom("constant", g);
  for (int cell : {0, 77, 255}) {
    CHECK(c.k1[cell] == 0.9);
    CHECK(c.k2[cell] == 0.75);
    CHECK(c.k3[cell] == 0.9);
    CHECK(c.vA.y()[cell] == 700.0);
    CHECK(c.vT.x()[cell] == -50.0);
    CHECK(c.dT[cell] == 3e-6);
    CHECK(c.dA[cell] == 3e-7);
  }

  const ParameterSet inner = phantom("inner_defect", g);
  CHECK(inner.k1.at(8, 8) == 0.0);
  CHECK(inner.k2.at(8, 8) == 0.0);
  CHECK(inner.k3.at(8, 8) == 0.9);  // k3 untouched inside the defect
  CHECK(inner.k1.at(0, 0) == 0.9);
  CHECK(inner.k2.at(15, 15) == 0.75);
  const auto mask = phantom_defect_mask("inner_defect", g);
  int count = 0;
  for (auto m : mask) count += m;
  CHECK(count == 3 * 3);  // 20% of 16 cells, rounded

  PhantomOptions opt;
  opt.defect_edge = Edge::Bottom;
  const ParameterSet edge = phantom("edge_defect", g, opt);
  CHECK(edge.k1.at(7, 0) == 0.0);
  CHECK(edge.k1.at(7, 2) == 0.9);  // strip is 10% of 16 = 2 rows

  CHECK_THROWS(phantom("bogus", g));
}

TEST_CASE("run config: echo is a fixed point of load/save") {
  const fs::path dir = fresh_dir("cfg");
  RunConfig cfg = tiny_config();
  cfg.preset = "inner_defect";
  cfg.seed = 424242;
  write_run_config((dir / "a.json").string(), cfg);
  const RunConfig r = load_run_config((dir / "a.json").string());
  write_run_config((dir / "b.json").string(), r);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK(r.seed == 424242);
  CHECK(r.preset == "inner_defect");
  CHECK(r.v_out[0][static_cast<int>(Edge::Top)] == 700.0);
}

TEST_CASE("boundary builder: parabolic inflow profile and outflow speeds") {
  RunConfig cfg = tiny_config();
  const Grid g = make_grid(cfg);
  const BoundarySpec bc = make_boundary(cfg, g);
  CHECK(bc.is_inflow_at(Edge::Bottom, 0));
  CHECK_FALSE(bc.is_inflow_at(Edge::Top, 0));
  // bump profile vanishes towards the corners and peaks at the middle
  const double j0 = bc.j_in_at(Edge::Bottom, Species::A, 0);
  const double jm = bc.j_in_at(Edge::Bottom, Species::A, g.nx / 2);
  CHECK(j0 < jm);
  const double x1 = -1.0 + 2.0 * 0.5 / g.nx;
  CHECK(j0 == doctest::Approx(50.0 * (1.0 - x1 * x1)));
  CHECK(bc.v_out_at(Edge::Top, Species::A, 3) == 700.0);
  CHECK(bc.v_out_at(Edge::Left, Species::T, 2) == 50.0);
  CHECK(bc.v_out_at(Edge::Left, Species::A, 2) == 0.0);
}

TEST_CASE("restriction averages refine blocks") {
  const Grid coarse = build_grid(3, 2, 1.0, 1.0);
  const Grid fine = build_grid(6, 4, 1.0, 1.0);
  ScalarField f(fine);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 6; ++i) f.at(i, j) = i + 10.0 * j;
  const ScalarField c = restrict_to(coarse, f, 2);
  CHECK(c.at(0, 0) == doctest::Approx((0 + 1 + 10 + 11) / 4.0));
  CHECK(c.at(2, 1) == doctest::Approx((24 + 25 + 34 + 35) / 4.0));
  CHECK_THROWS(restrict_to(coarse, f, 3));
}

TEST_CASE("pipeline: synth then reconstruct runs end to end") {
  RunConfig cfg = tiny_config();
  cfg.output_dir = fresh_dir("synth").string();
  CHECK(run_synth(cfg) == 0);
  CHECK(fs::exists(fs::path(cfg.output_dir) / "data_manifest.txt"));
  CHECK(fs::exists(fs::path(cfg.output_dir) / "projector.pdek"));
  CHECK(fs::exists(fs::path(cfg.output_dir) / "truth_k1.fld"));
  CHECK(fs::exists(fs::path(cfg.output_dir) / "resolved_config.json"));

  RunConfig rcfg = cfg;
  rcfg.data_dir = cfg.output_dir;
  rcfg.output_dir = fresh_dir("recon").string();
  CHECK(run_reconstruct(rcfg) == 0);
  CHECK(fs::exists(fs::path(rcfg.output_dir) / "recon_k1.fld"));
  CHECK(fs::exists(fs::path(rcfg.output_dir) / "report.csv"));
  CHECK(fs::exists(fs::path(rcfg.output_dir) / "summary.txt"));

  // degenerate data: zero counts must be refused
  RunConfig zcfg = cfg;
  zcfg.noise_scale = 0.0;
  zcfg.output_dir = fresh_dir("synth_zero").string();
  CHECK(run_synth(zcfg) == 0);
  RunConfig zrcfg = zcfg;
  zrcfg.data_dir = zcfg.output_dir;
  zrcfg.output_dir = fresh_dir("recon_zero").string();
  CHECK_THROWS_WITH_AS(run_reconstruct(zrcfg),
                       doctest::Contains("no counts"), std::runtime_error);
}

TEST_CASE("pipeline: synthetic data is reproducible bitwise from the echo") {
  RunConfig cfg = tiny_config();
  cfg.output_dir = fresh_dir("repro1").string();
  REQUIRE(run_synth(cfg) == 0);

  const RunConfig echo =
      load_run_config((fs::path(cfg.output_dir) / "resolved_config.json").string());
  RunConfig cfg2 = echo;
  cfg2.output_dir = fresh_dir("repro2").string();
  REQUIRE(run_synth(cfg2) == 0);

  for (const char* name : {"data_0000.sino", "data_0003.sino", "truth_k1.fld"}) {
    CHECK(slurp(fs::path(cfg.output_dir) / name) ==
          slurp(fs::path(cfg2.output_dir) / name));
  }
}

TEST_CASE("pipeline: simulate writes the trajectory, phantom writes fields") {
  RunConfig cfg = tiny_config();
  cfg.n_steps = 4;
  cfg.output_dir = fresh_dir("sim").string();
  CHECK(run_simulate(cfg) == 0);
  const Grid g = make_grid(cfg);
  for (const char* name : {"cA_0000.fld", "cT_0004.fld", "u_0002.fld"})
    CHECK(read_field((fs::path(cfg.output_dir) / name).string(), g).all_finite());

  RunConfig pcfg = tiny_config();
  pcfg.preset = "edge_defect";
  pcfg.output_dir = fresh_dir("ph").string();
  CHECK(run_phantom(pcfg) == 0);
  const ScalarField k1 =
      read_field((fs::path(pcfg.output_dir) / "phantom_k1.fld").string(), g);
  CHECK(k1.at(4, 0) == 0.0);
  CHECK(k1.at(4, 7) == 0.9);
}

TEST_CASE("pipeline: gradient check passes at the configured tolerance") {
  // the probe needs a long enough run for every compartment to carry
  // mass, otherwise some blocks have no finite-difference signal
  RunConfig cfg = tiny_config();
  cfg.nx = cfg.ny = 6;
  cfg.tau = 2e-3;
  cfg.n_steps = 500;
  cfg.n_frames = 5;
  cfg.refine = 1;
  cfg.sample = false;
  cfg.noise_scale = 1.0;
  cfg.j_in = {1.0, 0.0, 0.0};
  cfg.v_out = {};
  cfg.v_out[0][static_cast<int>(Edge::Top)] = 0.2;
  cfg.v_out[1][static_cast<int>(Edge::Left)] = 0.015;
  cfg.prior_value[static_cast<int>(ParamBlock::DA)] = 3e-3;
  cfg.prior_value[static_cast<int>(ParamBlock::DT)] = 1e-2;
  cfg.prior_value[static_cast<int>(ParamBlock::DV)] = 3e-3;
  cfg.prior_value[static_cast<int>(ParamBlock::VAy)] = 0.2;
  cfg.prior_value[static_cast<int>(ParamBlock::VTx)] = -0.015;
  cfg.prior_value[static_cast<int>(ParamBlock::VVy)] = 0.2;
  cfg.gc_cells_per_block = 2;
  cfg.output_dir = fresh_dir("gc").string();
  CHECK(run_gradcheck(cfg) == 0);
  CHECK(fs::exists(fs::path(cfg.output_dir) / "gradcheck.csv"));
}
