#pragma once

#include "flowpet/projector.hpp"

namespace flowpet {

inline constexpr double kFidelityFloor = 1e-12;

struct KlBreakdown {
  double value = 0.0;
  long floored_bins = 0;  // bins with counts > 0 but expectation <= floor
};

/// Poisson/Kullback-Leibler data discrepancy
///   sum_frames frame_duration * sum_bins [ g - f*log(g) ]
/// with g the expected sinogram, f the counts, 0*log(0) = 0, and g floored
/// at 1e-12 inside the log on bins with f > 0.
double kl_fidelity(const SinogramSequence& expected, const SinogramSequence& counts,
                   KlBreakdown* breakdown = nullptr);

/// Per-bin derivative of kl_fidelity with respect to the expectation:
/// frame_duration * (1 - f/g) with the same flooring conventions.
SinogramFrame kl_fidelity_gradient_frame(const SinogramFrame& expected,
                                         const SinogramFrame& counts,
                                         double frame_duration);

/// kl_fidelity shifted by its minimum over the expectation (the perfect
/// fit g = f): sum of (g - f) - f*log(g/f) per bin. Identical gradient
/// and minimizer; the summands are O((g-f)^2/f) near the fit, which makes
/// the value usable for finite-difference probing without cancellation.
double kl_fidelity_bregman(const SinogramSequence& expected,
                           const SinogramSequence& counts);

}  // namespace flowpet
