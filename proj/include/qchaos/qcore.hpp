// Statevector storage and elementary gate kernels.
//
// Basis convention: index m = sum_q alpha_q 2^(n_q - q), so qubit 1 is the
// most significant bit and the register encodes theta = 2 pi sum_q alpha_q 2^-q.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "qchaos/common.hpp"

namespace qchaos {

class StateVector {
 public:
  /// |0...0> on n_q qubits.
  explicit StateVector(int n_qubits);
  StateVector(int n_qubits, std::vector<cplx> amplitudes);

  static StateVector basis(int n_qubits, std::size_t index);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amp_.size(); }
  double norm() const;

  std::span<cplx> amplitudes() { return amp_; }
  std::span<const cplx> amplitudes() const { return amp_; }
  cplx& operator[](std::size_t m) { return amp_[m]; }
  const cplx& operator[](std::size_t m) const { return amp_[m]; }

 private:
  int n_qubits_;
  std::vector<cplx> amp_;
};

struct Hadamard {
  int qubit;
};

/// Phase exp(i angle) on the |11> component of (control, target).
struct ControlledPhase {
  int control;
  int target;
  double angle;
};

/// Diagonal two-qubit gate exp(i strength (w_i a_i + c_i)(w_j a_j + c_j)) for
/// bits a_i, a_j. With i == j it acts as a one-qubit diagonal gate.
struct PairPhase {
  int qubit_i;
  int qubit_j;
  double strength;
  double weight_i;
  double weight_j;
  double offset_i;
  double offset_j;

  double phase(int bit_i, int bit_j) const {
    return strength * (weight_i * bit_i + offset_i) * (weight_j * bit_j + offset_j);
  }
};

using Gate = std::variant<Hadamard, ControlledPhase, PairPhase>;

bool is_diagonal(const Gate& g);

/// Same gate with the inverse unitary.
Gate inverse(const Gate& g);

/// Throws ConfigError if any qubit index is outside [1, n_q].
void validate(const Gate& g, int n_qubits);

/// Diagonal of a diagonal gate (PairPhase, ControlledPhase) as N phases.
std::vector<cplx> diagonal_of(const Gate& g, int n_qubits);

void apply_gate(StateVector& state, const Gate& g);

/// Dense N x N matrix of the gate.
CMatrix gate_matrix(const Gate& g, int n_qubits);

/// Gates of the textbook QFT circuit without the final swap network:
/// n_q Hadamards and n_q (n_q - 1) / 2 controlled phases. The forward circuit
/// leaves output index y in register slot bit_reverse(y). The inverse circuit
/// is the reversed sequence with negated angles and expects that order.
std::vector<Gate> qft_circuit(int n_qubits, bool inverse);

/// Natural-order DFT with kernel exp(+2 pi i m n / N) / sqrt(N) (conjugate for
/// inverse), realized by the gate circuit plus an index relabeling.
void qft(StateVector& state, bool inverse);

namespace kernels {

/// Serial single-vector kernels.
void hadamard(std::span<cplx> amp, std::size_t mask);
void controlled_phase(std::span<cplx> amp, std::size_t mask_a, std::size_t mask_b, cplx phase);
void pair_phase(std::span<cplx> amp, std::size_t mask_i, std::size_t mask_j,
                const std::array<cplx, 4>& phases);
void diagonal(std::span<cplx> amp, std::span<const cplx> phases);
void apply(std::span<cplx> amp, int n_qubits, const Gate& g);

/// OpenMP kernels acting on every column of a column-major block.
void hadamard_columns(CMatrix& block, std::size_t mask);
void diagonal_columns(CMatrix& block, std::span<const cplx> phases);
void apply_columns(CMatrix& block, int n_qubits, const Gate& g);

}  // namespace kernels

}  // namespace qchaos
