#include "flowpet/em.hpp"

#include <stdexcept>

namespace flowpet {

std::vector<ScalarField> em_half_step(const std::vector<ScalarField>& u,
                                      const Projector& K, const SinogramSequence& counts,
                                      EmStats* stats, double eps_em) {
  if (static_cast<int>(u.size()) != counts.n_frames())
    throw std::invalid_argument("em_half_step: frame count mismatch");
  EmStats st;
  std::vector<ScalarField> out;
  out.reserve(u.size());
  for (size_t t = 0; t < u.size(); ++t) {
    const SinogramFrame g = project(K, u[t]);
    const SinogramFrame& f = counts.frames[t];
    if (f.size() != g.size()) throw std::invalid_argument("em_half_step: geometry mismatch");
    SinogramFrame ratio(g.n_angles, g.n_bins);
    for (int k = 0; k < g.size(); ++k) {
      if (f[k] > 0.0) {
        if (g[k] <= eps_em) ++st.floored_bins;
        ratio[k] = f[k] / std::max(g[k], eps_em);
      }
    }
    const ScalarField bp = backproject(K, ratio);
    ScalarField uh(u[t].grid());
    for (int c = 0; c < uh.size(); ++c)
      uh[c] = K.sens[c] > 0.0 ? u[t][c] / K.sens[c] * bp[c] : 0.0;
    out.push_back(std::move(uh));
  }
  if (stats) *stats = st;
  return out;
}

}  // namespace flowpet
