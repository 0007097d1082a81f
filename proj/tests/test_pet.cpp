#include <cmath>
#include <random>

#include "doctest.h"
#include "flowpet/fidelity.hpp"
#include "flowpet/poisson.hpp"

using namespace flowpet;

namespace {

ScalarField random_field(const Grid& g, std::uint64_t seed, double lo = 0.0,
                         double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  ScalarField f(g);
  for (double& x : f.values()) x = u(rng);
  return f;
}

}  // namespace

TEST_CASE("projector dimensions match the scanner layout") {
  const Grid g = build_grid(65, 65, 1.0, 1.0);
  const Projector K = build_projector(g, 96, 172);
  CHECK(K.rays() == 16512);
  CHECK(K.grid.cells() == 4225);
  for (double w : K.weight) CHECK(w >= 0.0);
  // sensitivity is positive well inside the field of view
  CHECK(K.sens.at(32, 32) > 0.0);
}

TEST_CASE("angle-0 projection of all-ones equals the chord lengths") {
  const Grid g = build_grid(8, 8, 1.0, 1.0);
  const Projector K = build_projector(g, 4, 16);
  ScalarField ones(g, 1.0);
  const SinogramFrame s = project(K, ones);
  for (int b = 0; b < K.n_bins; ++b) {
    const double x = 0.5 + (b + 0.5 - 0.5 * K.n_bins) * K.bin_width;
    const double chord = (x > 0.0 && x < 1.0) ? 1.0 : 0.0;
    CHECK(s.at(0, b) == doctest::Approx(chord).epsilon(1e-12));
  }
}

TEST_CASE("project is linear and extracts operator columns") {
  const Grid g = build_grid(6, 7, 1.0, 1.2);
  const Projector K = build_projector(g, 5, 9);

  const ScalarField zero(g);
  CHECK(project(K, zero).sum() == 0.0);

  const ScalarField u1 = random_field(g, 1), u2 = random_field(g, 2);
  ScalarField lin(g);
  for (int c = 0; c < g.cells(); ++c) lin[c] = 2.0 * u1[c] - 0.5 * u2[c];
  const SinogramFrame s1 = project(K, u1), s2 = project(K, u2), sl = project(K, lin);
  for (int k = 0; k < sl.size(); ++k)
    CHECK(sl[k] == doctest::Approx(2.0 * s1[k] - 0.5 * s2[k]).epsilon(1e-12));

  // single unit pixel: sinogram equals that column of the stored triples
  const int cell = g.index(3, 4);
  ScalarField e(g);
  e[cell] = 1.0;
  const SinogramFrame col = project(K, e);
  SinogramFrame expect(K.n_angles, K.n_bins);
  for (int r = 0; r < K.rays(); ++r)
    for (std::int64_t k = K.row_ptr[static_cast<size_t>(r)];
         k < K.row_ptr[static_cast<size_t>(r) + 1]; ++k)
      if (K.col[static_cast<size_t>(k)] == cell) expect[r] += K.weight[static_cast<size_t>(k)];
  for (int k = 0; k < col.size(); ++k) CHECK(col[k] == expect[k]);
}

TEST_CASE("backproject is the exact adjoint of project") {
  const Grid g = build_grid(5, 5, 1.0, 1.0);
  const Projector K = build_projector(g, 6, 8);

  const SinogramFrame zero(K.n_angles, K.n_bins);
  CHECK(backproject(K, zero).sum() == 0.0);

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    ScalarField u(g);
    for (double& x : u.values()) x = uni(rng);
    SinogramFrame s(K.n_angles, K.n_bins);
    for (double& x : s.v) x = uni(rng);
    const double lhs = dot(project(K, u), s);
    const double rhs = dot(u, backproject(K, s));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(lhs), std::abs(rhs)));
  }

  const SinogramFrame ones(K.n_angles, K.n_bins, 1.0);
  const ScalarField bp1 = backproject(K, ones);
  for (int c = 0; c < g.cells(); ++c) CHECK(bp1[c] == K.sens[c]);

  // nonnegative inputs map to nonnegative outputs
  const ScalarField upos = random_field(g, 5);
  const SinogramFrame spos = project(K, upos);
  for (int k = 0; k < spos.size(); ++k) CHECK(spos[k] >= 0.0);
  const ScalarField b = backproject(K, spos);
  for (int c = 0; c < g.cells(); ++c) CHECK(b[c] >= 0.0);
}

TEST_CASE("poisson sampling: zero scale, determinism, concentration") {
  SinogramSequence seq;
  seq.frame_duration = 1.0;
  SinogramFrame f(2, 5);
  for (int k = 0; k < f.size(); ++k) f[k] = 1e6;
  seq.frames.push_back(f);

  const SinogramSequence z = sample_poisson(seq, 0.0, 9);
  for (int k = 0; k < z.frames[0].size(); ++k) CHECK(z.frames[0][k] == 0.0);

  const SinogramSequence a = sample_poisson(seq, 1.0, 1234);
  const SinogramSequence b = sample_poisson(seq, 1.0, 1234);
  const SinogramSequence c = sample_poisson(seq, 1.0, 1235);
  bool any_diff = false;
  for (int k = 0; k < a.frames[0].size(); ++k) {
    CHECK(a.frames[0][k] == b.frames[0][k]);
    any_diff = any_diff || a.frames[0][k] != c.frames[0][k];
    CHECK(std::abs(a.frames[0][k] - 1e6) <= 5e3);  // 5 sigma
    CHECK(a.frames[0][k] == std::floor(a.frames[0][k]));
  }
  CHECK(any_diff);
}

TEST_CASE("kl fidelity: reference values and minimum at the data") {
  SinogramSequence g, f;
  g.frame_duration = f.frame_duration = 1.0;
  g.frames.emplace_back(1, 1);
  f.frames.emplace_back(1, 1);

  g.frames[0][0] = 1.0;
  f.frames[0][0] = 0.0;
  CHECK(kl_fidelity(g, f) == doctest::Approx(1.0));

  f.frames[0][0] = 1.0;
  CHECK(kl_fidelity(g, f) == doctest::Approx(1.0));  // 1 - 1*log(1)

  // fixed f > 0: minimized over the expectation at g = f
  f.frames[0][0] = 2.5;
  auto val = [&](double x) {
    g.frames[0][0] = x;
    return kl_fidelity(g, f);
  };
  const double at_min = val(2.5);
  for (double x : {0.5, 1.0, 2.0, 3.0, 10.0}) CHECK(val(x) > at_min);

  // frame duration scales the value
  g.frames[0][0] = 2.0;
  g.frame_duration = 0.5;
  f.frame_duration = 0.5;
  CHECK(kl_fidelity(g, f) ==
        doctest::Approx(0.5 * (2.0 - 2.5 * std::log(2.0))).epsilon(1e-14));

  // counts with zero expectation are reported
  g.frame_duration = f.frame_duration = 1.0;
  g.frames[0][0] = 0.0;
  KlBreakdown bd;
  kl_fidelity(g, f, &bd);
  CHECK(bd.floored_bins == 1);
}
