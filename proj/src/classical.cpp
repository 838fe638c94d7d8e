#include "qchaos/classical.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qchaos/common.hpp"
#include "qchaos/rng.hpp"

namespace qchaos {

namespace {

double wrap_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r >= kTwoPi ? 0.0 : r;
}

double wrap_momentum(double p) { return wrap_angle(p + kPi) - kPi; }

double circular_gap(double a, double b) {
  const double d = std::fabs(wrap_angle(a - b));
  return std::min(d, kTwoPi - d);
}

}  // namespace

ClassicalState classical_step(ClassicalState s, double K) {
  const double p = wrap_momentum(s.p + K * (s.theta - kPi));
  return {p, wrap_angle(s.theta + p)};
}

double torus_distance(const ClassicalState& a, const ClassicalState& b) {
  return std::max(circular_gap(a.p, b.p), circular_gap(a.theta, b.theta));
}

double default_diffusion_threshold(double K) {
  if (K < 0.0 && K > -4.0) return kTwoPi * std::sqrt(-K);
  return kPi / 2.0;
}

double diffusive_fraction(double K, int n_samples, int n_steps, double threshold,
                          std::uint64_t seed) {
  if (n_samples < 100) throw ConfigError("diffusive_fraction needs at least 100 samples");
  if (n_steps < 1) throw ConfigError("diffusive_fraction needs at least one step");
  std::vector<unsigned char> diffusive(static_cast<std::size_t>(n_samples), 0);

#pragma omp parallel for schedule(dynamic, 64)
  for (int i = 0; i < n_samples; ++i) {
    CounterRng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    double theta = rng.uniform(0.0, kTwoPi);
    double p = rng.uniform(-kPi, kPi);
    double drift = 0.0;
    for (int t = 0; t < n_steps; ++t) {
      const double dp = K * (theta - kPi);
      drift += dp;
      if (std::fabs(drift) > threshold) {
        diffusive[static_cast<std::size_t>(i)] = 1;
        break;
      }
      p = wrap_momentum(p + dp);
      theta = wrap_angle(theta + p);
    }
  }
  const auto hits = std::count(diffusive.begin(), diffusive.end(), 1);
  return static_cast<double>(hits) / n_samples;
}

}  // namespace qchaos
