// Quantum sawtooth map: parameters, exact kick/rotation operators and the
// compilation of one map iteration into elementary gates.
#pragma once

#include <cstddef>
#include <vector>

#include "qchaos/common.hpp"
#include "qchaos/qcore.hpp"

namespace qchaos {

struct MapParams {
  double K = 0.0;        ///< classical chaos parameter, K = k T
  int n_qubits = 0;
  std::size_t dim = 0;   ///< N = 2^n_q levels
  double period = 0.0;   ///< T = 2 pi / N
  double kick = 0.0;     ///< k = K / T
  double theta0 = 0.0;   ///< angle shift
  double phi = 0.0;      ///< momentum shift (flux)
};

MapParams make_params(double K, int n_qubits, double theta0 = 0.0, double phi = 0.0);

/// Signed momentum of DFT index m: m for m < N/2, m - N otherwise.
constexpr long momentum_label(std::size_t m, std::size_t dim) {
  return m < dim / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(dim);
}

/// exp(i k (theta_m + theta0 - pi)^2 / 2), theta_m = 2 pi m / N.
std::vector<cplx> ideal_kick_phases(const MapParams& p);

/// exp(-i T (n + phi)^2 / 2) indexed by DFT index m with n = momentum_label(m).
std::vector<cplx> ideal_rotation_phases(const MapParams& p);

enum class Block { Kick, ForwardQft, Rotation, InverseQft };

struct ScheduledGate {
  Gate gate;
  Block block;
};

class GateSequence {
 public:
  GateSequence(int n_qubits, std::vector<ScheduledGate> gates)
      : n_qubits_(n_qubits), gates_(std::move(gates)) {}

  int n_qubits() const { return n_qubits_; }
  std::size_t size() const { return gates_.size(); }
  const std::vector<ScheduledGate>& gates() const { return gates_; }
  auto begin() const { return gates_.begin(); }
  auto end() const { return gates_.end(); }

  std::size_t count(Block b) const;

 private:
  int n_qubits_;
  std::vector<ScheduledGate> gates_;
};

/// One map iteration as 3 n_q^2 + n_q gates: n_q^2 kick PairPhases (row-major
/// over ordered qubit pairs), forward QFT, n_q^2 rotation PairPhases acting on
/// the bit-reversed momentum register, inverse QFT.
GateSequence compile_iteration(const MapParams& p);

/// Dense DFT matrix F(n, m) = exp(+2 pi i m n / N) / sqrt(N).
CMatrix dft_matrix(std::size_t dim);

/// U0 = F^-1 diag(rotation) F diag(kick), assembled from dense DFT matrices.
CMatrix oracle_floquet(const MapParams& p);

/// Product of the gate matrices of a sequence (last gate leftmost).
CMatrix sequence_matrix(const GateSequence& seq);

}  // namespace qchaos
