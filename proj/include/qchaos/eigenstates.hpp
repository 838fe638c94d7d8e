// Eigenvector diagnostics: overlaps with the ideal eigenbasis, eigenstate
// entropy and Husimi phase-space densities on the torus.
#pragma once

#include <vector>

#include "qchaos/common.hpp"
#include "qchaos/qcore.hpp"
#include "qchaos/sawtooth.hpp"

namespace qchaos {

/// p(a, b) = |<ideal_b | perturbed_a>|^2; rows index perturbed states.
using OverlapMatrix = RMatrix;

/// ||V^dagger V - I||_max.
double orthonormality_residual(const CMatrix& v);

OverlapMatrix overlaps(const CMatrix& ideal, const CMatrix& perturbed);

struct EntropyResult {
  std::vector<double> per_state;  ///< S_a = -sum_b p log2 p
  double mean = 0.0;
};

EntropyResult entropy(const OverlapMatrix& p);

/// eps at which the mean entropy first rises through 1 (log-linear).
double entropy_border(const std::vector<double>& eps, const std::vector<double>& mean_entropy,
                      double level = 1.0);

struct HusimiGrid {
  int n_theta = 0;
  int n_p = 0;
  double squeezing = 1.0;      ///< Delta p / Delta theta
  double normalization = 0.0;  ///< raw grid sum times cell area before rescaling
  std::vector<double> density; ///< row-major, index i_theta * n_p + i_p

  double theta(int i) const { return kTwoPi * i / n_theta; }
  double p(int j) const { return -kPi + kTwoPi * j / n_p; }
  double cell_area() const { return (kTwoPi / n_theta) * (kTwoPi / n_p); }
  double at(int i_theta, int i_p) const {
    return density[static_cast<std::size_t>(i_theta) * static_cast<std::size_t>(n_p) + static_cast<std::size_t>(i_p)];
  }
};

/// 4 sqrt(N) points per axis, capped at 256.
int default_husimi_points(std::size_t dim);

/// Projection of a theta-representation state onto torus coherent states with
/// Delta theta = Delta p = sqrt(T/2), periodized over winding images and
/// truncated where the Gaussian amplitude falls below 1e-15.
HusimiGrid husimi(const StateVector& state, const MapParams& p, int n_theta, int n_p);

}  // namespace qchaos
