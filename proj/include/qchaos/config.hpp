// Experiment configuration: JSON round trip, defaults and the physics hash.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qchaos/spectral.hpp"

namespace qchaos {

enum class Statistic { Eta, EtaTilde, Entropy };
enum class CouplingRule { Zero, Equal };

Statistic parse_statistic(const std::string& name);
std::string to_string(Statistic s);
CouplingRule parse_coupling(const std::string& name);
std::string to_string(CouplingRule c);

/// Logarithmic grid over [min, max] with a fixed number of points per decade.
/// Points are 10^(k / per_decade) for integer k, so grids with the same
/// density share points.
std::vector<double> log_grid(double min, double max, int per_decade);

/// Parses "min:max:per_decade".
std::vector<double> parse_eps_grid(const std::string& spec);

struct ExperimentConfig {
  double K = std::sqrt(2.0);
  std::vector<int> n_qubits{6};
  std::string regime = "ergodic";
  std::vector<double> eps = log_grid(1e-7, 1e-1, 8);
  CouplingRule coupling = CouplingRule::Zero;
  double tau_g = 1.0;
  double theta0 = 0.0;
  double phi = 0.0;
  int realizations = 0;  ///< 0 selects the N_D 2^n_q ~ 1e4 budget rule
  std::uint64_t seed = 20020619;
  std::vector<Statistic> statistics{Statistic::Eta};
  double threshold = 0.2;
  std::string out_dir = "out";
  int threads = 0;           ///< 0 keeps the OpenMP default
  bool keep_levels = false;  ///< keep realization-0 quasi-energies per point
  bool dump_spectra = false; ///< write raw spectra as binary + JSON sidecar

  void validate() const;
  bool needs_eigenvectors() const;
  /// Realizations used at n_q: explicit value or clamp(round(1e4 / 2^n_q), 3, 1000).
  int realizations_for(int n_qubits) const;
};

inline constexpr int kHardQubitCap = 12;

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

/// FNV-1a over the canonical JSON of every physics-affecting field
/// (everything except output location, thread count and dump switches).
std::string config_hash(const ExperimentConfig& c);

/// Regime presets: ergodic (K = sqrt 2), quasi-integrable (K = -0.1,
/// theta0 = phi = sqrt(2)/5, eta-tilde), integrable (K = -1, eta-tilde).
ExperimentConfig preset(const std::string& regime);

}  // namespace qchaos
