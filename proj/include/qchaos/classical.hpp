// Classical sawtooth map on the torus, used to cross-check the quantum
// regimes (global periodicity at integer K, diffusive fraction at K = -0.1).
#pragma once

#include <cstdint>

namespace qchaos {

/// Rescaled action p = T n wrapped to [-pi, pi) and angle theta in [0, 2 pi).
struct ClassicalState {
  double p = 0.0;
  double theta = 0.0;
};

/// p' = p + K (theta - pi), theta' = theta + p', both wrapped to the torus.
ClassicalState classical_step(ClassicalState s, double K);

/// Distance between two torus points (max over the two wrapped coordinates).
double torus_distance(const ClassicalState& a, const ClassicalState& b);

/// Default excursion threshold for diffusive_fraction. For -4 < K < 0 this is
/// the momentum diameter 2 pi sqrt(-K) of the largest invariant ellipse of the
/// linearized map that fits inside the sawtooth cell; orbits exceeding it have
/// left the regular region. Outside the stable window it is pi / 2.
double default_diffusion_threshold(double K);

/// Fraction of uniformly sampled initial conditions whose maximum unwrapped
/// momentum excursion |p(t) - p(0)| over n_steps exceeds threshold.
double diffusive_fraction(double K, int n_samples, int n_steps, double threshold,
                          std::uint64_t seed);

}  // namespace qchaos
