// Seeded disorder sweeps: statistic versus imperfection strength, chaos-border
// tables and scaling fits, with per-realization checkpointing.
#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qchaos/config.hpp"
#include "qchaos/floquet.hpp"
#include "qchaos/spectral.hpp"

namespace qchaos {

inline constexpr const char* kVersion = "qchaos 1.0.0";

/// Sufficient statistics of one disorder realization at one sweep point.
struct RealizationResult {
  std::uint64_t index = 0;
  SpacingHistogram histogram;
  double entropy = 0.0;  ///< mean eigenstate entropy (0 if not requested)
  std::uint64_t checksum = 0;
  std::vector<double> levels;  ///< quasi-energies, kept for realization 0 on request
};

struct PointResult {
  int n_qubits = 0;
  std::size_t eps_index = 0;
  double eps = 0.0;
  int realizations = 0;
  std::map<Statistic, double> value;
  std::map<Statistic, double> stderr_of;
  SpacingHistogram pooled;
  std::uint64_t checksum = 0;
  std::vector<double> levels;
};

struct BorderRow {
  int n_qubits = 0;
  double eps_chi = 0.0;
  double stderr_of = 0.0;
  double model_value = 0.0;
};

struct BorderTable {
  Statistic statistic = Statistic::Eta;
  double level = 0.2;
  std::vector<BorderRow> rows;
  std::optional<ScalingFit> fit;       ///< requested model
  std::optional<ScalingFit> free_fit;  ///< free base-2 exponent
};

struct RunRecord {
  std::string config_hash;
  ExperimentConfig config;
  std::vector<PointResult> points;  ///< sorted by (n_q, eps index)
  std::vector<BorderTable> borders;
  double wall_seconds = 0.0;
  std::string version = kVersion;
  bool complete = true;

  const PointResult* find(int n_qubits, std::size_t eps_index) const;
  /// Points with eps > 0 for one qubit count, ascending in eps.
  CrossoverCurve curve(Statistic s, int n_qubits) const;
  const BorderTable* border(Statistic s) const;
};

struct SweepOptions {
  /// Stop (complete = false) after computing this many new realizations.
  std::size_t task_budget = std::numeric_limits<std::size_t>::max();
  /// Read and append the per-realization checkpoint in out_dir.
  bool checkpoint = false;
  /// Caps concurrent realizations so their dense N x N work matrices fit.
  std::size_t memory_budget_bytes = std::size_t{3} << 30;
};

/// Realizations that may run concurrently at n_q within a memory budget
/// (about six complex N x N matrices each), at least 1.
int max_concurrent_tasks(int n_qubits, std::size_t memory_budget_bytes);

/// Every (n_q, eps) point of the configured grid.
RunRecord run_sweep(const ExperimentConfig& cfg, const SweepOptions& opts = {});

struct BorderOptions {
  ScalingModel model = ScalingModel::Ergodic;
  /// Evaluate only the grid points needed to bracket each crossing, walking
  /// from a guess; otherwise evaluate the whole grid.
  bool bracket = true;
  /// Constant of the model used to place the first guess (0: grid middle).
  double guess_constant = 0.0;
};

/// eps_chi per n_q for each configured statistic (threshold crossing for
/// eta / eta-tilde, S = 1 for entropy) plus the scaling fits.
RunRecord run_border_study(const ExperimentConfig& cfg, const BorderOptions& border,
                           const SweepOptions& opts = {});

/// Level at which a statistic defines the border and the crossing direction.
double border_level(Statistic s, const ExperimentConfig& cfg);
Crossing border_direction(Statistic s);

/// One perturbed Floquet operator for (n_q, eps, realization index) under cfg.
CMatrix perturbed_floquet(const ExperimentConfig& cfg, int n_qubits, double eps, std::uint64_t realization);

/// Disorder seed stream used for n_q under cfg (realization r uses index r).
std::uint64_t disorder_stream(const ExperimentConfig& cfg, int n_qubits);

std::uint64_t checksum_levels(const std::vector<double>& levels);

}  // namespace qchaos
