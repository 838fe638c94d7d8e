#include "qchaos/sawtooth.hpp"

#include <algorithm>
#include <cmath>

namespace qchaos {

MapParams make_params(double K, int n_qubits, double theta0, double phi) {
  if (n_qubits < 2) throw ConfigError("sawtooth map needs at least 2 qubits");
  if (n_qubits > 30) throw ConfigError("qubit count out of range");
  if (!std::isfinite(K) || !std::isfinite(theta0) || !std::isfinite(phi)) {
    throw ConfigError("map parameters must be finite");
  }
  MapParams p;
  p.K = K;
  p.n_qubits = n_qubits;
  p.dim = std::size_t{1} << n_qubits;
  p.period = kTwoPi / static_cast<double>(p.dim);
  p.kick = K / p.period;
  p.theta0 = theta0;
  p.phi = phi;
  return p;
}

std::vector<cplx> ideal_kick_phases(const MapParams& p) {
  std::vector<cplx> d(p.dim);
  for (std::size_t m = 0; m < p.dim; ++m) {
    const double x = kTwoPi * static_cast<double>(m) / static_cast<double>(p.dim) + p.theta0 - kPi;
    d[m] = std::polar(1.0, 0.5 * p.kick * x * x);
  }
  return d;
}

std::vector<cplx> ideal_rotation_phases(const MapParams& p) {
  std::vector<cplx> d(p.dim);
  for (std::size_t m = 0; m < p.dim; ++m) {
    const double n = static_cast<double>(momentum_label(m, p.dim)) + p.phi;
    d[m] = std::polar(1.0, -0.5 * p.period * n * n);
  }
  return d;
}

std::size_t GateSequence::count(Block b) const {
  return static_cast<std::size_t>(
      std::count_if(gates_.begin(), gates_.end(), [b](const auto& g) { return g.block == b; }));
}

GateSequence compile_iteration(const MapParams& p) {
  const int nq = p.n_qubits;
  const double N = static_cast<double>(p.dim);
  std::vector<ScheduledGate> gates;
  gates.reserve(static_cast<std::size_t>(3 * nq * nq + nq));

  // Kick: k/2 (theta + theta0 - pi)^2 = 2 pi^2 k (sum_q [a_q 2^-q + c])^2.
  const double kick_strength = 2.0 * kPi * kPi * p.kick;
  const double kick_offset = (p.theta0 - kPi) / (kTwoPi * nq);
  for (int i = 1; i <= nq; ++i) {
    for (int j = 1; j <= nq; ++j) {
      gates.push_back({PairPhase{i, j, kick_strength, std::ldexp(1.0, -i), std::ldexp(1.0, -j),
                                 kick_offset, kick_offset},
                       Block::Kick});
    }
  }

  for (auto& g : qft_circuit(nq, false)) gates.push_back({g, Block::ForwardQft});

  // Rotation: -T/2 (n + phi)^2 = -pi N (sum_q [b_q w_q + c])^2 in units of N.
  // After the swap-free QFT, qubit q carries bit q-1 of the DFT index; the top
  // bit (qubit n_q) has negative weight so that n covers [-N/2, N/2).
  auto rot_weight = [&](int q) { return q == nq ? -0.5 : std::ldexp(1.0, q - 1 - nq); };
  const double rot_strength = -kPi * N;
  const double rot_offset = p.phi / (N * nq);
  for (int i = 1; i <= nq; ++i) {
    for (int j = 1; j <= nq; ++j) {
      gates.push_back({PairPhase{i, j, rot_strength, rot_weight(i), rot_weight(j), rot_offset,
                                 rot_offset},
                       Block::Rotation});
    }
  }

  for (auto& g : qft_circuit(nq, true)) gates.push_back({g, Block::InverseQft});
  return GateSequence(nq, std::move(gates));
}

CMatrix dft_matrix(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      // reduce m n mod N before scaling to keep the argument small
      const auto mn = static_cast<std::size_t>((r * c) % n);
      f(r, c) = std::polar(scale, kTwoPi * static_cast<double>(mn) / static_cast<double>(dim));
    }
  }
  return f;
}

CMatrix oracle_floquet(const MapParams& p) {
  if (p.n_qubits > kMaxDenseQubits) throw ResourceError("oracle_floquet: register too large");
  const auto kick = ideal_kick_phases(p);
  const auto rot = ideal_rotation_phases(p);
  const CMatrix f = dft_matrix(p.dim);
  const auto n = static_cast<Eigen::Index>(p.dim);
  const CVector kick_v = Eigen::Map<const CVector>(kick.data(), n);
  const CVector rot_v = Eigen::Map<const CVector>(rot.data(), n);
  const CMatrix inner = rot_v.asDiagonal() * (f * kick_v.asDiagonal());
  return f.adjoint() * inner;
}

CMatrix sequence_matrix(const GateSequence& seq) {
  if (seq.n_qubits() > kMaxDenseQubits) throw ResourceError("sequence_matrix: register too large");
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << seq.n_qubits());
  CMatrix u = CMatrix::Identity(n, n);
  for (const auto& g : seq) kernels::apply_columns(u, seq.n_qubits(), g.gate);
  return u;
}

}  // namespace qchaos
