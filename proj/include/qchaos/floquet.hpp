// Construction and diagonalization of the (perturbed) Floquet operator.
#pragma once

#include <utility>
#include <vector>

#include "qchaos/common.hpp"
#include "qchaos/imperfections.hpp"
#include "qchaos/sawtooth.hpp"

namespace qchaos {

/// One-iteration operator in the register basis: column m is the perturbed
/// (or, with e == nullptr, ideal) iteration applied to basis state m.
///
/// With a diagonal propagator all gates between two Hadamards commute with E
/// and are fused into a single diagonal layer, so the build costs
/// O(n_q N^2). With a dense propagator the full N x N product is composed
/// gate by gate, one block GEMM per inter-gate interval. Columns are
/// processed in parallel with OpenMP.
CMatrix build_floquet(const GateSequence& seq, const InterGatePropagator* e);

/// Serial reference: every column evolved independently with
/// run_perturbed_iteration. Kept for cross-checking build_floquet.
CMatrix build_floquet_reference(const GateSequence& seq, const InterGatePropagator* e);

/// ||U^dagger U - I||_max.
double unitarity_residual(const CMatrix& u);

struct FloquetSpectrum {
  std::vector<double> quasi_energies;  ///< ascending, in [0, 2 pi)
  CMatrix eigenvectors;                ///< columns aligned with quasi_energies; empty if skipped
  double unitarity_residual = 0.0;
  double eigen_residual = 0.0;         ///< max_a ||U v_a - exp(i l_a) v_a||; 0 if no vectors
};

/// Eigensystem of a unitary matrix via the Cayley transform
/// A = i (1 - W)(1 + W)^-1, W = exp(i g) U, which is Hermitian with
/// eigenvalues tan(mu / 2). The shift g is moved into the widest spectral
/// gap when an eigenvalue lands too close to -1. Falls back to the Schur
/// route if a residual check fails.
FloquetSpectrum diagonalize(const CMatrix& u, bool with_vectors = true);

/// Reference eigensolver: complex Schur form (LAPACK zgees). For a normal
/// matrix the Schur vectors are the eigenvectors.
FloquetSpectrum diagonalize_schur(const CMatrix& u, bool with_vectors = true);

/// Even / odd blocks under the reflection m -> (N - m) mod N, which maps
/// theta -> 2 pi - theta in the register basis and n -> -n after the DFT.
/// Self-paired indices 0 and N/2 belong to the even block.
std::pair<CMatrix, CMatrix> parity_blocks(const MapParams& p, const CMatrix& u);

/// Dense reflection operator m -> (N - m) mod N.
CMatrix parity_operator(std::size_t dim);

/// Restricts BLAS/LAPACK to one thread (used inside OpenMP task loops).
void set_blas_threads(int n);

}  // namespace qchaos
