// Nearest-neighbour spacing statistics of quasi-energy spectra: circular
// unfolding, Wigner-type surmises, the eta / eta-tilde crossover measures,
// chaos-border extraction and scaling-law fits.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qchaos/common.hpp"
#include "qchaos/rng.hpp"

namespace qchaos {

enum class Surmise { GOE, GOE2, GUE };

/// P_O(s) = (pi/2) s exp(-pi s^2/4);
/// P_O2(s) = (erfc(sqrt(pi) s/4) (pi s/4) exp(-pi s^2/16) + exp(-pi s^2/8)) / 2;
/// P_U(s) = (32 s^2/pi^2) exp(-4 s^2/pi).
double surmise_density(Surmise kind, double s);

/// Closed-form cumulative distributions of the surmises.
double surmise_cdf(Surmise kind, double s);

/// First positive intersection of P_O2 and P_U (0.50285...).
double crossover_point();

/// Normalized nearest-neighbour spacings of N sorted phases on [0, 2 pi),
/// including the wrap-around gap; the result sums to N.
std::vector<double> spacings(std::span<const double> sorted_phases);

/// Spacing summary sufficient for eta and eta-tilde: a histogram of bin width
/// 0.1 on [0, 5] (mass beyond 5 goes to the last bin) and the count at or
/// below the crossover point.
struct SpacingHistogram {
  static constexpr int kBins = 50;
  static constexpr double kBinWidth = 0.1;

  std::array<std::uint64_t, kBins> counts{};
  std::uint64_t below_crossover = 0;
  std::uint64_t total = 0;

  void add(double s);
  void add(std::span<const double> s);
  void merge(const SpacingHistogram& other);
  double density(int bin) const;
  static double bin_center(int bin) { return (bin + 0.5) * kBinWidth; }
};

/// Pooled spacings with provenance.
struct SpacingSample {
  std::vector<double> s;
  int n_qubits = 0;
  double K = 0.0;
  double epsilon = 0.0;
  double rho = 0.0;

  std::size_t count() const { return s.size(); }
  SpacingHistogram histogram() const;
};

inline constexpr std::size_t kMinSpacingCount = 100;

/// eta = [F(s0) - F_U(s0)] / [F_O2(s0) - F_U(s0)] with F the empirical CDF.
/// 1 for superposed-GOE statistics, 0 for GUE.
double eta(const SpacingHistogram& h, std::size_t min_count = kMinSpacingCount);
double eta(const SpacingSample& sample, std::size_t min_count = kMinSpacingCount);

/// L2 distance between the histogram density and the bin-averaged P_U.
double eta_tilde(const SpacingHistogram& h, std::size_t min_count = kMinSpacingCount);
double eta_tilde(const SpacingSample& sample, std::size_t min_count = kMinSpacingCount);

/// Statistic value as a function of imperfection strength.
struct CrossoverCurve {
  std::vector<double> eps;    ///< strictly increasing, positive
  std::vector<double> value;
  std::vector<int> realizations;

  void validate() const;
};

enum class Crossing { Downward, Upward };

/// Log-linear interpolation (in log eps) of the first crossing of threshold.
double threshold_crossing(const CrossoverCurve& curve, double threshold, Crossing direction);

/// eps at which the crossover measure first drops to threshold.
double eps_chi(const CrossoverCurve& curve, double threshold = 0.2);

enum class ScalingModel {
  Ergodic,       ///< C 2^(-n_q/2) n_q^(-5/2)
  Integrable,    ///< C n_q^(-5/2)
  FreeExponent,  ///< C 2^(b n_q) n_q^(-5/2), b fitted
};

struct ScalingPoint {
  int n_qubits;
  double eps;
};

struct ScalingFit {
  ScalingModel model;
  double constant = 0.0;
  double slope = 0.0;  ///< base-2 exponent per qubit (FreeExponent only)
  std::vector<double> log_residuals;
  double rms = 0.0;

  double predict(int n_qubits) const;
};

/// Least squares in log space.
ScalingFit fit_scaling(std::span<const ScalingPoint> points, ScalingModel model);

ScalingModel parse_scaling_model(const std::string& name);
std::string to_string(ScalingModel model);

/// Inverse-CDF draw from a surmise.
double sample_surmise(Surmise kind, CounterRng& rng);

/// Spacings of the union of two independent level sequences whose spacings
/// follow the GOE surmise, normalized to unit mean; exactly n_spacings values.
/// Follows P_O2.
std::vector<double> sample_superposed_goe(std::size_t n_spacings, CounterRng& rng);

}  // namespace qchaos
