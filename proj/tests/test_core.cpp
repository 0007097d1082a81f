#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "flowpet/regularizer.hpp"

using namespace flowpet;

namespace {

ParameterSet random_params(const Grid& g, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ParameterSet p(g);
  for (ParamBlock b : all_param_blocks)
    for (double& x : block_field(p, b).values()) x = scale * u(rng);
  return p;
}

}  // namespace

TEST_CASE("build_grid spacing and origin") {
  const Grid g = build_grid(65, 65, 1.0, 1.0);
  CHECK(g.hx == doctest::Approx(1.0 / 65).epsilon(1e-15));
  CHECK(g.hy == doctest::Approx(1.0 / 65).epsilon(1e-15));
  CHECK(g.cells() == 4225);
  CHECK(g.x0 == doctest::Approx(0.5 / 65));

  const Grid g2 = build_grid(2, 2, 2.0, 2.0);
  CHECK(g2.hx == 1.0);
  CHECK(g2.hy == 1.0);

  const Grid g3 = build_grid(8, 4, 1.0, 1.0);
  CHECK(g3.hx == 0.125);
  CHECK(g3.hy == 0.25);

  CHECK_THROWS_AS(build_grid(1, 4, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(4, 4, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(4, 4, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("project_parameters clamps and is idempotent") {
  const Grid g = build_grid(4, 4, 1.0, 1.0);
  const Bounds b;

  ParameterSet p(g);
  for (double& x : p.k1.values()) x = 0.5;
  for (double& x : p.dA.values()) x = 1e-3;
  for (double& x : p.dT.values()) x = 1e-3;
  for (double& x : p.dV.values()) x = 1e-3;
  const ParameterSet q = project_parameters(p, b);
  for (int c = 0; c < g.cells(); ++c) {
    CHECK(q.k1[c] == 0.5);  // feasible input unchanged
    CHECK(q.dA[c] == 1e-3);
  }

  p.k1[3] = -0.3;
  p.dA[5] = 0.0;
  p.vT.x()[7] = -2e4;
  const ParameterSet r = project_parameters(p, b);
  CHECK(r.k1[3] == 0.0);
  CHECK(r.dA[5] == b.d_min);
  CHECK(r.vT.x()[7] == -b.v_max);

  // idempotent and a max-norm contraction per component
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2e4, 2e4);
  ParameterSet a = random_params(g, 42, 2e4);
  ParameterSet pa = project_parameters(a, b);
  ParameterSet paa = project_parameters(pa, b);
  ParameterSet c = random_params(g, 43, 2e4);
  ParameterSet pc = project_parameters(c, b);
  for (ParamBlock blk : all_param_blocks) {
    const auto& f1 = block_field(pa, blk);
    const auto& f2 = block_field(paa, blk);
    const auto& fa = block_field(a, blk);
    const auto& fc = block_field(c, blk);
    const auto& fpc = block_field(pc, blk);
    for (int i = 0; i < f1.size(); ++i) {
      CHECK(f1[i] == f2[i]);
      CHECK(std::abs(f1[i] - fpc[i]) <= std::abs(fa[i] - fc[i]) + 1e-15);
    }
  }
}

TEST_CASE("regularizer value: zero case, single-cell oracle, weight linearity") {
  const Grid g = build_grid(6, 5, 1.2, 0.8);
  RegularizerConfig r;
  r.prior = ParameterSet(g);
  for (ParamBlock b : all_param_blocks) {
    for (double& x : block_field(r.prior, b).values()) x = 0.7;
    r.alpha_of(b) = 0.3;
    r.xi_of(b) = 0.05;
  }

  ParameterSet p = r.prior;
  CHECK(regularizer_value(p, r) == 0.0);

  // single cell differing by delta: alpha*delta^2*area plus the forward
  // difference gradient terms of the touched faces
  const double delta = 0.25;
  const int ci = 2, cj = 2;
  p.k2.at(ci, cj) += delta;
  const double area = g.cell_area();
  const double gx = delta / g.hx, gy = delta / g.hy;
  // faces: (ci-1,cj)->(ci,cj), (ci,cj)->(ci+1,cj), same in y: 2 x-faces, 2 y-faces
  const double expect =
      area * (0.3 * delta * delta + 0.05 * (2 * gx * gx + 2 * gy * gy));
  CHECK(regularizer_value(p, r) == doctest::Approx(expect).epsilon(1e-13));

  RegularizerConfig r2 = r;
  for (ParamBlock b : all_param_blocks) {
    r2.alpha_of(b) *= 2.0;
    r2.xi_of(b) *= 2.0;
  }
  CHECK(regularizer_value(p, r2) ==
        doctest::Approx(2.0 * regularizer_value(p, r)).epsilon(1e-14));

  CHECK(regularizer_value(random_params(g, 5), r) >= 0.0);
}

TEST_CASE("regularizer gradient: minimizer, decoupled quadratic, FD agreement") {
  const Grid g = build_grid(5, 4, 1.0, 1.3);
  RegularizerConfig r;
  r.prior = random_params(g, 7);
  for (ParamBlock b : all_param_blocks) {
    r.alpha_of(b) = 0.2 + 0.01 * static_cast<int>(b);
    r.xi_of(b) = 0.03 + 0.002 * static_cast<int>(b);
  }

  // p = p* with constant fields: zero gradient
  RegularizerConfig rc = r;
  rc.prior = ParameterSet(g);
  for (ParamBlock b : all_param_blocks)
    for (double& x : block_field(rc.prior, b).values()) x = 1.1;
  const ParameterSet g0 = regularizer_gradient(rc.prior, rc);
  for (ParamBlock b : all_param_blocks)
    for (double x : block_field(g0, b).values()) CHECK(x == 0.0);

  // xi = 0: gradient is exactly 2*alpha*(p - p*)*area
  RegularizerConfig rq = r;
  rq.xi = {};
  const ParameterSet p = random_params(g, 8);
  const ParameterSet gq = regularizer_gradient(p, rq);
  for (ParamBlock b : all_param_blocks) {
    const auto& pf = block_field(p, b);
    const auto& prf = block_field(rq.prior, b);
    const auto& gf = block_field(gq, b);
    for (int c = 0; c < pf.size(); ++c)
      CHECK(gf[c] == doctest::Approx(2.0 * rq.alpha_of(b) * (pf[c] - prf[c]) *
                                     g.cell_area())
                         .epsilon(1e-13));
  }

  // central differences of the value match the gradient
  const ParameterSet grad = regularizer_gradient(p, r);
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> pick(0, g.cells() - 1);
  for (ParamBlock b : all_param_blocks) {
    for (int rep = 0; rep < 3; ++rep) {
      const int c = pick(rng);
      const double eps = 1e-5;
      ParameterSet q = p;
      block_field(q, b)[c] += eps;
      const double jp = regularizer_value(q, r);
      block_field(q, b)[c] -= 2 * eps;
      const double jm = regularizer_value(q, r);
      const double fd = (jp - jm) / (2 * eps);
      const double an = block_field(grad, b)[c];
      CHECK(an == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}
