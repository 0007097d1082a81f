#include "flowpet/poisson.hpp"

#include <random>
#include <stdexcept>

namespace flowpet {

SinogramSequence sample_poisson(const SinogramSequence& expected, double scale,
                                std::uint64_t seed) {
  if (!(scale >= 0.0)) throw std::invalid_argument("sample_poisson: scale must be >= 0");
  std::mt19937_64 rng(seed);
  std::poisson_distribution<long long> dist;
  using param_t = std::poisson_distribution<long long>::param_type;
  SinogramSequence out = expected;
  for (SinogramFrame& f : out.frames) {
    for (double& x : f.v) {
      if (!(x >= 0.0)) throw std::invalid_argument("sample_poisson: negative expectation");
      const double lambda = scale * x;
      x = lambda == 0.0 ? 0.0 : static_cast<double>(dist(rng, param_t(lambda)));
    }
  }
  return out;
}

}  // namespace flowpet
