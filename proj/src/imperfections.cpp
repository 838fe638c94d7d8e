#include "qchaos/imperfections.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "qchaos/rng.hpp"

namespace qchaos {

namespace {

Eigen::Index as_index(std::size_t v) { return static_cast<Eigen::Index>(v); }

double sigma_z(std::size_t m, int n_qubits, int q) {
  return (m & qubit_mask(n_qubits, q)) ? -1.0 : 1.0;
}

InterGatePropagator::Sector diagonalize_sector(std::vector<std::size_t> rows, const CMatrix& h,
                                               double tau_g) {
  const double herm = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) {
    std::ostringstream msg;
    msg << "static Hamiltonian not Hermitian (residual " << herm << ")";
    throw ContractError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericError("static Hamiltonian eigensolve failed");
  InterGatePropagator::Sector s;
  s.rows = std::move(rows);
  s.energies = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();
  const double scale = 1.0 + h.cwiseAbs().maxCoeff();
  const double resid =
      (h * s.eigenvectors - s.eigenvectors * s.energies.asDiagonal()).cwiseAbs().maxCoeff();
  if (resid > 1e-10 * scale * static_cast<double>(h.rows())) {
    std::ostringstream msg;
    msg << "static Hamiltonian eigensolve residual " << resid;
    throw NumericError(msg.str());
  }
  CVector phases(s.energies.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, -s.energies(k) * tau_g);
  s.propagator = s.eigenvectors * phases.asDiagonal() * s.eigenvectors.adjoint();
  return s;
}

}  // namespace

void ImperfectionParams::validate() const {
  if (!(delta >= 0.0) || !(coupling >= 0.0)) throw ConfigError("imperfection amplitudes must be >= 0");
  if (!(tau_g > 0.0)) throw ConfigError("tau_g must be positive");
}

bool DisorderRealization::has_coupling() const {
  for (double j : coupling) {
    if (j != 0.0) return true;
  }
  return false;
}

DisorderRealization sample_disorder(int n_qubits, const ImperfectionParams& params,
                                    std::uint64_t master_seed, std::uint64_t index) {
  params.validate();
  if (n_qubits < 1) throw ConfigError("qubit count must be positive");
  DisorderRealization r;
  r.n_qubits = n_qubits;
  r.seed = derive_seed(master_seed, {index});
  CounterRng rng(r.seed);
  r.detuning.resize(static_cast<std::size_t>(n_qubits));
  r.coupling.resize(static_cast<std::size_t>(n_qubits - 1));
  // detunings first, then couplings, so changing J leaves the delta_i pattern intact
  for (auto& d : r.detuning) d = params.delta * rng.uniform(-0.5, 0.5);
  for (auto& j : r.coupling) j = params.coupling * rng.uniform(-1.0, 1.0);
  return r;
}

CMatrix build_static_hamiltonian(const DisorderRealization& r, double delta0) {
  const int nq = r.n_qubits;
  if (nq > kMaxDenseQubits) throw ResourceError("static Hamiltonian too large for dense storage");
  const std::size_t dim = std::size_t{1} << nq;
  CMatrix h = CMatrix::Zero(as_index(dim), as_index(dim));
  for (std::size_t m = 0; m < dim; ++m) {
    double diag = 0.0;
    for (int q = 1; q <= nq; ++q) diag += (delta0 + r.detuning[static_cast<std::size_t>(q - 1)]) * sigma_z(m, nq, q);
    h(as_index(m), as_index(m)) = diag;
    for (int q = 1; q < nq; ++q) {
      const std::size_t flip = qubit_mask(nq, q) | qubit_mask(nq, q + 1);
      h(as_index(m ^ flip), as_index(m)) += r.coupling[static_cast<std::size_t>(q - 1)];
    }
  }
  return h;
}

InterGatePropagator InterGatePropagator::identity(int n_qubits) {
  return from_diagonal(n_qubits, std::vector<cplx>(std::size_t{1} << n_qubits, cplx{1.0, 0.0}));
}

InterGatePropagator InterGatePropagator::from_diagonal(int n_qubits, std::vector<cplx> phases) {
  if (phases.size() != (std::size_t{1} << n_qubits)) throw ConfigError("diagonal length must be 2^n_q");
  InterGatePropagator e;
  e.n_qubits_ = n_qubits;
  e.diagonal_ = std::move(phases);
  return e;
}

InterGatePropagator InterGatePropagator::from_sectors(int n_qubits, std::vector<Sector> sectors) {
  std::size_t total = 0;
  for (const auto& s : sectors) total += s.rows.size();
  if (total != (std::size_t{1} << n_qubits)) throw ConfigError("sectors must partition the basis");
  InterGatePropagator e;
  e.n_qubits_ = n_qubits;
  e.sectors_ = std::move(sectors);
  return e;
}

CMatrix InterGatePropagator::dense() const {
  const auto n = as_index(dim());
  if (is_diagonal()) {
    return Eigen::Map<const CVector>(diagonal_.data(), n).asDiagonal();
  }
  CMatrix out = CMatrix::Zero(n, n);
  for (const auto& s : sectors_) {
    for (std::size_t c = 0; c < s.rows.size(); ++c) {
      for (std::size_t r = 0; r < s.rows.size(); ++r) {
        out(as_index(s.rows[r]), as_index(s.rows[c])) = s.propagator(as_index(r), as_index(c));
      }
    }
  }
  return out;
}

void InterGatePropagator::apply(std::span<cplx> amp) const {
  if (amp.size() != dim()) throw ContractError("propagator dimension mismatch");
  if (is_diagonal()) {
    kernels::diagonal(amp, diagonal_);
    return;
  }
  for (const auto& s : sectors_) {
    CVector x(as_index(s.rows.size()));
    for (std::size_t r = 0; r < s.rows.size(); ++r) x(as_index(r)) = amp[s.rows[r]];
    const CVector y = s.propagator * x;
    for (std::size_t r = 0; r < s.rows.size(); ++r) amp[s.rows[r]] = y(as_index(r));
  }
}

void InterGatePropagator::apply_columns(CMatrix& block) const {
  if (static_cast<std::size_t>(block.rows()) != dim()) throw ContractError("propagator dimension mismatch");
  if (is_diagonal()) {
    kernels::diagonal_columns(block, diagonal_);
    return;
  }
  const Eigen::Index cols = block.cols();
  for (const auto& s : sectors_) {
    const auto rows = as_index(s.rows.size());
    CMatrix x(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) x(r, c) = block(as_index(s.rows[static_cast<std::size_t>(r)]), c);
    }
    const CMatrix y = s.propagator * x;
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) block(as_index(s.rows[static_cast<std::size_t>(r)]), c) = y(r, c);
    }
  }
}

InterGatePropagator make_propagator(const CMatrix& hamiltonian, double tau_g) {
  const auto n = static_cast<std::size_t>(hamiltonian.rows());
  if (hamiltonian.cols() != hamiltonian.rows() || n == 0 || !std::has_single_bit(n)) {
    throw ConfigError("Hamiltonian must be square with power-of-two dimension");
  }
  const int nq = std::countr_zero(n);
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  std::vector<InterGatePropagator::Sector> sectors;
  sectors.push_back(diagonalize_sector(std::move(rows), hamiltonian, tau_g));
  return InterGatePropagator::from_sectors(nq, std::move(sectors));
}

InterGatePropagator make_propagator(const DisorderRealization& r, double tau_g) {
  const int nq = r.n_qubits;
  const std::size_t dim = std::size_t{1} << nq;
  if (!r.has_coupling()) {
    std::vector<cplx> phases(dim);
    for (std::size_t m = 0; m < dim; ++m) {
      double energy = 0.0;
      for (int q = 1; q <= nq; ++q) energy += r.detuning[static_cast<std::size_t>(q - 1)] * sigma_z(m, nq, q);
      phases[m] = std::polar(1.0, -energy * tau_g);
    }
    return InterGatePropagator::from_diagonal(nq, std::move(phases));
  }
  const CMatrix h = build_static_hamiltonian(r);
  std::vector<InterGatePropagator::Sector> sectors;
  for (int parity = 0; parity < 2; ++parity) {
    std::vector<std::size_t> rows;
    for (std::size_t m = 0; m < dim; ++m) {
      if (std::popcount(m) % 2 == parity) rows.push_back(m);
    }
    const auto k = as_index(rows.size());
    CMatrix block(k, k);
    for (Eigen::Index c = 0; c < k; ++c) {
      for (Eigen::Index a = 0; a < k; ++a) {
        block(a, c) = h(as_index(rows[static_cast<std::size_t>(a)]), as_index(rows[static_cast<std::size_t>(c)]));
      }
    }
    sectors.push_back(diagonalize_sector(std::move(rows), block, tau_g));
  }
  return InterGatePropagator::from_sectors(nq, std::move(sectors));
}

void run_perturbed_iteration(StateVector& state, const GateSequence& seq,
                             const InterGatePropagator& e) {
  if (state.n_qubits() != seq.n_qubits() || e.n_qubits() != seq.n_qubits()) {
    throw ContractError("run_perturbed_iteration: register sizes disagree");
  }
  for (const auto& g : seq) {
    apply_gate(state, g.gate);
    e.apply(state.amplitudes());
  }
}

}  // namespace qchaos
