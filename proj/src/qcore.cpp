#include "qchaos/qcore.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace qchaos {

namespace {

void check_qubit(int q, int n_qubits) {
  if (q < 1 || q > n_qubits) {
    throw ConfigError("qubit index " + std::to_string(q) + " outside [1, " +
                      std::to_string(n_qubits) + "]");
  }
}

std::array<cplx, 4> pair_phases(const PairPhase& g) {
  std::array<cplx, 4> out;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) out[2 * a + b] = std::polar(1.0, g.phase(a, b));
  }
  return out;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

StateVector::StateVector(int n_qubits) : StateVector(basis(n_qubits, 0)) {}

StateVector::StateVector(int n_qubits, std::vector<cplx> amplitudes)
    : n_qubits_(n_qubits), amp_(std::move(amplitudes)) {
  if (n_qubits < 1 || n_qubits > 30) throw ConfigError("qubit count out of range");
  if (amp_.size() != (std::size_t{1} << n_qubits)) {
    throw ConfigError("amplitude array length must be 2^n_q");
  }
}

StateVector StateVector::basis(int n_qubits, std::size_t index) {
  if (n_qubits < 1 || n_qubits > 30) throw ConfigError("qubit count out of range");
  std::vector<cplx> amp(std::size_t{1} << n_qubits);
  if (index >= amp.size()) throw ConfigError("basis index out of range");
  amp[index] = 1.0;
  return StateVector(n_qubits, std::move(amp));
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

bool is_diagonal(const Gate& g) { return !std::holds_alternative<Hadamard>(g); }

Gate inverse(const Gate& g) {
  return std::visit(overloaded{
                        [](const Hadamard& h) -> Gate { return h; },
                        [](ControlledPhase c) -> Gate {
                          c.angle = -c.angle;
                          return c;
                        },
                        [](PairPhase p) -> Gate {
                          p.strength = -p.strength;
                          return p;
                        },
                    },
                    g);
}

void validate(const Gate& g, int n_qubits) {
  std::visit(overloaded{
                 [&](const Hadamard& h) { check_qubit(h.qubit, n_qubits); },
                 [&](const ControlledPhase& c) {
                   check_qubit(c.control, n_qubits);
                   check_qubit(c.target, n_qubits);
                   if (c.control == c.target) throw ConfigError("controlled phase needs two distinct qubits");
                 },
                 [&](const PairPhase& p) {
                   check_qubit(p.qubit_i, n_qubits);
                   check_qubit(p.qubit_j, n_qubits);
                 },
             },
             g);
}

std::vector<cplx> diagonal_of(const Gate& g, int n_qubits) {
  validate(g, n_qubits);
  if (!is_diagonal(g)) throw ContractError("diagonal_of: Hadamard is not diagonal");
  std::vector<cplx> d(std::size_t{1} << n_qubits, cplx{1.0, 0.0});
  kernels::apply(d, n_qubits, g);
  return d;
}

void apply_gate(StateVector& state, const Gate& g) {
  validate(g, state.n_qubits());
  kernels::apply(state.amplitudes(), state.n_qubits(), g);
}

CMatrix gate_matrix(const Gate& g, int n_qubits) {
  validate(g, n_qubits);
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  CMatrix m = CMatrix::Identity(n, n);
  kernels::apply_columns(m, n_qubits, g);
  return m;
}

std::vector<Gate> qft_circuit(int n_qubits, bool inverse_circuit) {
  std::vector<Gate> gates;
  gates.reserve(static_cast<std::size_t>(n_qubits * (n_qubits + 1) / 2));
  for (int j = 1; j <= n_qubits; ++j) {
    gates.emplace_back(Hadamard{j});
    for (int k = j + 1; k <= n_qubits; ++k) {
      gates.emplace_back(ControlledPhase{k, j, kTwoPi / std::ldexp(1.0, k - j + 1)});
    }
  }
  if (inverse_circuit) {
    std::vector<Gate> rev;
    rev.reserve(gates.size());
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) rev.push_back(inverse(*it));
    return rev;
  }
  return gates;
}

void qft(StateVector& state, bool inverse_transform) {
  const int nq = state.n_qubits();
  auto amp = state.amplitudes();
  auto relabel = [&] {
    for (std::size_t m = 0; m < amp.size(); ++m) {
      const std::size_t r = bit_reverse(m, nq);
      if (r > m) std::swap(amp[m], amp[r]);
    }
  };
  if (inverse_transform) relabel();
  for (const auto& g : qft_circuit(nq, inverse_transform)) kernels::apply(amp, nq, g);
  if (!inverse_transform) relabel();
}

namespace kernels {

void hadamard(std::span<cplx> amp, std::size_t mask) {
  const double r = std::numbers::sqrt2 / 2.0;
  for (std::size_t m = 0; m < amp.size(); ++m) {
    if (m & mask) continue;
    const cplx a = amp[m];
    const cplx b = amp[m | mask];
    amp[m] = r * (a + b);
    amp[m | mask] = r * (a - b);
  }
}

void controlled_phase(std::span<cplx> amp, std::size_t mask_a, std::size_t mask_b, cplx phase) {
  const std::size_t both = mask_a | mask_b;
  for (std::size_t m = 0; m < amp.size(); ++m) {
    if ((m & both) == both) amp[m] *= phase;
  }
}

void pair_phase(std::span<cplx> amp, std::size_t mask_i, std::size_t mask_j,
                const std::array<cplx, 4>& phases) {
  for (std::size_t m = 0; m < amp.size(); ++m) {
    const int a = (m & mask_i) ? 1 : 0;
    const int b = (m & mask_j) ? 1 : 0;
    amp[m] *= phases[static_cast<std::size_t>(2 * a + b)];
  }
}

void diagonal(std::span<cplx> amp, std::span<const cplx> phases) {
  for (std::size_t m = 0; m < amp.size(); ++m) amp[m] *= phases[m];
}

void apply(std::span<cplx> amp, int n_qubits, const Gate& g) {
  std::visit(overloaded{
                 [&](const Hadamard& h) { hadamard(amp, qubit_mask(n_qubits, h.qubit)); },
                 [&](const ControlledPhase& c) {
                   controlled_phase(amp, qubit_mask(n_qubits, c.control),
                                    qubit_mask(n_qubits, c.target), std::polar(1.0, c.angle));
                 },
                 [&](const PairPhase& p) {
                   pair_phase(amp, qubit_mask(n_qubits, p.qubit_i),
                              qubit_mask(n_qubits, p.qubit_j), pair_phases(p));
                 },
             },
             g);
}

void hadamard_columns(CMatrix& block, std::size_t mask) {
  const auto rows = static_cast<std::size_t>(block.rows());
  const Eigen::Index cols = block.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < cols; ++c) {
    hadamard(std::span<cplx>(block.col(c).data(), rows), mask);
  }
}

void diagonal_columns(CMatrix& block, std::span<const cplx> phases) {
  const auto rows = static_cast<std::size_t>(block.rows());
  const Eigen::Index cols = block.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < cols; ++c) {
    diagonal(std::span<cplx>(block.col(c).data(), rows), phases);
  }
}

void apply_columns(CMatrix& block, int n_qubits, const Gate& g) {
  const auto rows = static_cast<std::size_t>(block.rows());
  const Eigen::Index cols = block.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < cols; ++c) {
    apply(std::span<cplx>(block.col(c).data(), rows), n_qubits, g);
  }
}

}  // namespace kernels

}  // namespace qchaos
