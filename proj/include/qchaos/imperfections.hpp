// Static hardware imperfections: random detunings and nearest-neighbour
// sigma^x sigma^x couplings acting during the interval between gates.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qchaos/common.hpp"
#include "qchaos/qcore.hpp"
#include "qchaos/sawtooth.hpp"

namespace qchaos {

struct ImperfectionParams {
  double delta = 0.0;     ///< detuning amplitude; delta_i uniform in [-delta/2, delta/2]
  double coupling = 0.0;  ///< coupling amplitude; J_i uniform in [-J, J]
  double tau_g = 1.0;     ///< interval between gates

  double epsilon() const { return delta * tau_g; }
  double rho() const { return coupling * tau_g; }
  void validate() const;
};

struct DisorderRealization {
  int n_qubits = 0;
  std::vector<double> detuning;  ///< delta_i, one per qubit
  std::vector<double> coupling;  ///< J_{i,i+1}, n_q - 1 entries (open chain)
  std::uint64_t seed = 0;

  bool has_coupling() const;
};

/// Deterministic in (master_seed, index). Draws are made at unit amplitude
/// and scaled, so a fixed index yields the same disorder pattern at every
/// imperfection strength.
DisorderRealization sample_disorder(int n_qubits, const ImperfectionParams& params,
                                    std::uint64_t master_seed, std::uint64_t index);

/// H_s = sum_i (delta0 + delta_i) sigma^z_i + sum_i J_i sigma^x_i sigma^x_{i+1}.
CMatrix build_static_hamiltonian(const DisorderRealization& r, double delta0 = 0.0);

/// E = exp(-i H_s tau_g), applied once after every gate.
class InterGatePropagator {
 public:
  /// One Hermitian block of H_s on a subset of basis states.
  struct Sector {
    std::vector<std::size_t> rows;
    Eigen::VectorXd energies;
    CMatrix eigenvectors;
    CMatrix propagator;
  };

  static InterGatePropagator identity(int n_qubits);
  static InterGatePropagator from_diagonal(int n_qubits, std::vector<cplx> phases);
  static InterGatePropagator from_sectors(int n_qubits, std::vector<Sector> sectors);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return std::size_t{1} << n_qubits_; }
  bool is_diagonal() const { return sectors_.empty(); }
  const std::vector<cplx>& diagonal() const { return diagonal_; }
  const std::vector<Sector>& sectors() const { return sectors_; }

  /// Full N x N matrix.
  CMatrix dense() const;

  void apply(std::span<cplx> amp) const;
  /// block <- E * block.
  void apply_columns(CMatrix& block) const;

 private:
  int n_qubits_ = 0;
  std::vector<cplx> diagonal_;
  std::vector<Sector> sectors_;
};

/// Dense path: eigendecomposition of an arbitrary Hermitian H.
InterGatePropagator make_propagator(const CMatrix& hamiltonian, double tau_g);

/// Realization path: diagonal phases when all couplings vanish, otherwise the
/// two parity sectors of H_s (sigma^x sigma^x preserves the parity of the
/// number of set bits) diagonalized separately.
InterGatePropagator make_propagator(const DisorderRealization& r, double tau_g);

/// Applies each gate followed by one application of E.
void run_perturbed_iteration(StateVector& state, const GateSequence& seq,
                             const InterGatePropagator& e);

}  // namespace qchaos
