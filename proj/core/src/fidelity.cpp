#include "flowpet/fidelity.hpp"

#include <cmath>
#include <stdexcept>

namespace flowpet {

double kl_fidelity(const SinogramSequence& expected, const SinogramSequence& counts,
                   KlBreakdown* breakdown) {
  if (expected.n_frames() != counts.n_frames())
    throw std::invalid_argument("kl_fidelity: frame count mismatch");
  KlBreakdown bd;
  for (int t = 0; t < expected.n_frames(); ++t) {
    const SinogramFrame& g = expected.frames[static_cast<size_t>(t)];
    const SinogramFrame& f = counts.frames[static_cast<size_t>(t)];
    if (g.size() != f.size()) throw std::invalid_argument("kl_fidelity: bin count mismatch");
    double acc = 0.0;
    for (int k = 0; k < g.size(); ++k) {
      if (!(g[k] >= 0.0) || !(f[k] >= 0.0))
        throw std::invalid_argument("kl_fidelity: negative entry");
      acc += g[k];
      if (f[k] > 0.0) {
        if (g[k] <= kFidelityFloor) ++bd.floored_bins;
        acc -= f[k] * std::log(std::max(g[k], kFidelityFloor));
      }
    }
    bd.value += expected.frame_duration * acc;
  }
  if (breakdown) *breakdown = bd;
  return bd.value;
}

double kl_fidelity_bregman(const SinogramSequence& expected,
                           const SinogramSequence& counts) {
  if (expected.n_frames() != counts.n_frames())
    throw std::invalid_argument("kl_fidelity_bregman: frame count mismatch");
  double value = 0.0;
  for (int t = 0; t < expected.n_frames(); ++t) {
    const SinogramFrame& g = expected.frames[static_cast<size_t>(t)];
    const SinogramFrame& f = counts.frames[static_cast<size_t>(t)];
    if (g.size() != f.size())
      throw std::invalid_argument("kl_fidelity_bregman: bin count mismatch");
    double acc = 0.0;
    for (int k = 0; k < g.size(); ++k) {
      if (f[k] > 0.0)
        acc += (g[k] - f[k]) - f[k] * std::log(std::max(g[k], kFidelityFloor) / f[k]);
      else
        acc += g[k];
    }
    value += expected.frame_duration * acc;
  }
  return value;
}

SinogramFrame kl_fidelity_gradient_frame(const SinogramFrame& expected,
                                         const SinogramFrame& counts,
                                         double frame_duration) {
  if (expected.size() != counts.size())
    throw std::invalid_argument("kl_fidelity_gradient_frame: size mismatch");
  SinogramFrame out(expected.n_angles, expected.n_bins);
  for (int k = 0; k < expected.size(); ++k) {
    double d = 1.0;
    if (counts[k] > 0.0 && expected[k] > kFidelityFloor) d -= counts[k] / expected[k];
    out[k] = frame_duration * d;
  }
  return out;
}

}  // namespace flowpet
