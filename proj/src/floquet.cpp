#include "qchaos/floquet.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <variant>

extern "C" void openblas_set_num_threads(int);

namespace qchaos {

namespace {

Eigen::Index as_index(std::size_t v) { return static_cast<Eigen::Index>(v); }

lapack_complex_double* lp(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

double wrap_phase(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r >= kTwoPi ? 0.0 : r;
}

// Layer of the fused build: either a Hadamard mask or a diagonal phase vector.
struct Layer {
  std::size_t hadamard_mask = 0;
  std::vector<cplx> phases;
};

std::vector<Layer> fuse_diagonal_layers(const GateSequence& seq, const InterGatePropagator* e) {
  const int nq = seq.n_qubits();
  const std::size_t dim = std::size_t{1} << nq;
  std::vector<Layer> layers;
  std::vector<cplx> pending(dim, cplx{1.0, 0.0});
  bool dirty = false;
  auto flush = [&] {
    if (dirty) layers.push_back({0, pending});
    std::fill(pending.begin(), pending.end(), cplx{1.0, 0.0});
    dirty = false;
  };
  for (const auto& sg : seq) {
    if (const auto* h = std::get_if<Hadamard>(&sg.gate)) {
      flush();
      layers.push_back({qubit_mask(nq, h->qubit), {}});
    } else {
      kernels::apply(pending, nq, sg.gate);
      dirty = true;
    }
    if (e != nullptr) {
      kernels::diagonal(pending, e->diagonal());
      dirty = true;
    }
  }
  flush();
  return layers;
}

std::vector<std::size_t> sort_permutation(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

void finish_spectrum(FloquetSpectrum& out, const CMatrix& u, std::vector<double> lambda,
                     CMatrix vectors, bool with_vectors) {
  const auto order = sort_permutation(lambda);
  out.quasi_energies.resize(lambda.size());
  for (std::size_t k = 0; k < order.size(); ++k) out.quasi_energies[k] = lambda[order[k]];
  out.eigen_residual = 0.0;
  if (with_vectors) {
    out.eigenvectors.resize(vectors.rows(), vectors.cols());
    for (std::size_t k = 0; k < order.size(); ++k) out.eigenvectors.col(as_index(k)) = vectors.col(as_index(order[k]));
    const CMatrix uv = u * out.eigenvectors;
    for (Eigen::Index k = 0; k < uv.cols(); ++k) {
      const cplx ev = std::polar(1.0, out.quasi_energies[static_cast<std::size_t>(k)]);
      out.eigen_residual = std::max(out.eigen_residual, (uv.col(k) - ev * out.eigenvectors.col(k)).norm());
    }
  }
}

// Eigenphases mu (not yet shifted) of W = exp(i gamma) U through the Cayley
// transform. Returns false if the factorization failed.
bool cayley_eigensystem(const CMatrix& u, double gamma, bool with_vectors, std::vector<double>& mu,
                        double& max_abs_tan, CMatrix& vectors) {
  const Eigen::Index n = u.rows();
  const cplx shift = std::polar(1.0, gamma);
  CMatrix lhs = shift * u;
  CMatrix rhs = -lhs;
  lhs.diagonal().array() += 1.0;
  rhs.diagonal().array() += 1.0;
  std::vector<lapack_int> piv(static_cast<std::size_t>(n));
  const lapack_int n_l = static_cast<lapack_int>(n);
  if (LAPACKE_zgesv(LAPACK_COL_MAJOR, n_l, n_l, lp(lhs.data()), n_l, piv.data(), lp(rhs.data()), n_l) != 0) {
    return false;
  }
  // A = i (1 + W)^-1 (1 - W), symmetrized against rounding.
  CMatrix a = cplx{0.0, 1.0} * rhs;
  a = 0.5 * (a + a.adjoint()).eval();
  Eigen::VectorXd w(n);
  if (LAPACKE_zheevd(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'U', n_l, lp(a.data()), n_l, w.data()) != 0) {
    return false;
  }
  mu.resize(static_cast<std::size_t>(n));
  max_abs_tan = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    mu[static_cast<std::size_t>(k)] = 2.0 * std::atan(w(k));
    max_abs_tan = std::max(max_abs_tan, std::fabs(w(k)));
  }
  if (with_vectors) vectors = std::move(a);
  return true;
}

// Shift that sends the midpoint of the widest gap of the sorted phases to pi.
double gap_centering_shift(std::vector<double> lambda) {
  std::sort(lambda.begin(), lambda.end());
  double best_gap = lambda.front() + kTwoPi - lambda.back();
  double best_mid = lambda.back() + 0.5 * best_gap;
  for (std::size_t k = 0; k + 1 < lambda.size(); ++k) {
    const double gap = lambda[k + 1] - lambda[k];
    if (gap > best_gap) {
      best_gap = gap;
      best_mid = lambda[k] + 0.5 * gap;
    }
  }
  return wrap_phase(kPi - best_mid);
}

}  // namespace

void set_blas_threads(int n) { openblas_set_num_threads(std::max(1, n)); }

CMatrix build_floquet(const GateSequence& seq, const InterGatePropagator* e) {
  const int nq = seq.n_qubits();
  if (nq > kMaxDenseQubits) throw ResourceError("build_floquet: register too large for a dense operator");
  if (e != nullptr && e->n_qubits() != nq) throw ContractError("build_floquet: propagator size mismatch");
  const std::size_t dim = std::size_t{1} << nq;
  const auto n = as_index(dim);
  CMatrix u = CMatrix::Identity(n, n);

  if (e == nullptr || e->is_diagonal()) {
    const auto layers = fuse_diagonal_layers(seq, e);
#pragma omp parallel for schedule(static)
    for (Eigen::Index c = 0; c < n; ++c) {
      std::span<cplx> col(u.col(c).data(), dim);
      for (const auto& layer : layers) {
        if (layer.hadamard_mask != 0) {
          kernels::hadamard(col, layer.hadamard_mask);
        } else {
          kernels::diagonal(col, layer.phases);
        }
      }
    }
    return u;
  }

  for (const auto& sg : seq) {
    kernels::apply_columns(u, nq, sg.gate);
    e->apply_columns(u);
  }
  return u;
}

CMatrix build_floquet_reference(const GateSequence& seq, const InterGatePropagator* e) {
  const int nq = seq.n_qubits();
  if (nq > kMaxDenseQubits) throw ResourceError("build_floquet_reference: register too large");
  const std::size_t dim = std::size_t{1} << nq;
  const InterGatePropagator ident = InterGatePropagator::identity(nq);
  const InterGatePropagator& prop = e != nullptr ? *e : ident;
  CMatrix u(as_index(dim), as_index(dim));
  for (std::size_t m = 0; m < dim; ++m) {
    auto state = StateVector::basis(nq, m);
    run_perturbed_iteration(state, seq, prop);
    for (std::size_t r = 0; r < dim; ++r) u(as_index(r), as_index(m)) = state[r];
  }
  return u;
}

double unitarity_residual(const CMatrix& u) {
  CMatrix g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

FloquetSpectrum diagonalize(const CMatrix& u, bool with_vectors) {
  if (u.rows() != u.cols() || u.rows() == 0) throw ContractError("diagonalize: matrix must be square");
  FloquetSpectrum out;
  out.unitarity_residual = unitarity_residual(u);
  if (out.unitarity_residual > 1e-6) {
    std::ostringstream msg;
    msg << "diagonalize: matrix is not unitary (residual " << out.unitarity_residual << ")";
    throw ContractError(msg.str());
  }
  const auto n = static_cast<double>(u.rows());
  const double tan_limit = 8.0 * n;

  double gamma = 0.3183098861837907;
  std::vector<double> mu;
  double max_tan = 0.0;
  CMatrix vectors;
  bool ok = cayley_eigensystem(u, gamma, with_vectors, mu, max_tan, vectors);
  if (ok && max_tan > tan_limit) {
    std::vector<double> rough(mu.size());
    for (std::size_t k = 0; k < mu.size(); ++k) rough[k] = wrap_phase(mu[k] - gamma);
    gamma = gap_centering_shift(std::move(rough));
    ok = cayley_eigensystem(u, gamma, with_vectors, mu, max_tan, vectors);
  }
  if (!ok) return diagonalize_schur(u, with_vectors);

  std::vector<double> lambda(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) lambda[k] = wrap_phase(mu[k] - gamma);

  if (!with_vectors) {
    // trace identity as a cheap consistency check on the eigenvalues
    cplx sum{0.0, 0.0};
    for (double l : lambda) sum += std::polar(1.0, l);
    if (std::abs(sum - u.trace()) > 1e-8 * n) return diagonalize_schur(u, false);
  }
  finish_spectrum(out, u, std::move(lambda), std::move(vectors), with_vectors);
  if (with_vectors && out.eigen_residual > 1e-8) return diagonalize_schur(u, true);
  return out;
}

FloquetSpectrum diagonalize_schur(const CMatrix& u, bool with_vectors) {
  if (u.rows() != u.cols() || u.rows() == 0) throw ContractError("diagonalize: matrix must be square");
  FloquetSpectrum out;
  out.unitarity_residual = unitarity_residual(u);
  const Eigen::Index n = u.rows();
  const lapack_int n_l = static_cast<lapack_int>(n);
  CMatrix t = u;
  CVector w(n);
  CMatrix z(with_vectors ? n : 1, with_vectors ? n : 1);
  lapack_int sdim = 0;
  const lapack_int info = LAPACKE_zgees(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'N', nullptr, n_l,
                                        lp(t.data()), n_l, &sdim, lp(w.data()), lp(z.data()),
                                        with_vectors ? n_l : 1);
  if (info != 0) throw NumericError("zgees failed to converge (info " + std::to_string(info) + ")");
  std::vector<double> lambda(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) lambda[static_cast<std::size_t>(k)] = wrap_phase(std::arg(w(k)));
  finish_spectrum(out, u, std::move(lambda), with_vectors ? std::move(z) : CMatrix{}, with_vectors);
  if (with_vectors && out.eigen_residual > 1e-8) {
    std::ostringstream msg;
    msg << "diagonalize: eigen residual " << out.eigen_residual << " exceeds 1e-8";
    throw NumericError(msg.str());
  }
  return out;
}

CMatrix parity_operator(std::size_t dim) {
  const auto n = as_index(dim);
  CMatrix p = CMatrix::Zero(n, n);
  for (std::size_t m = 0; m < dim; ++m) p(as_index((dim - m) % dim), as_index(m)) = 1.0;
  return p;
}

std::pair<CMatrix, CMatrix> parity_blocks(const MapParams& p, const CMatrix& u) {
  const std::size_t dim = p.dim;
  const auto n = as_index(dim);
  if (u.rows() != n || u.cols() != n) throw ContractError("parity_blocks: dimension mismatch");
  const CMatrix par = parity_operator(dim);
  const double comm = (u * par - par * u).cwiseAbs().maxCoeff();
  if (comm > 1e-8) {
    std::ostringstream msg;
    msg << "parity_blocks: operator breaks the reflection symmetry (commutator " << comm << ")";
    throw ContractError(msg.str());
  }
  const std::size_t half = dim / 2;
  const double r = std::numbers::sqrt2 / 2.0;
  CMatrix even = CMatrix::Zero(n, as_index(half + 1));
  CMatrix odd = CMatrix::Zero(n, as_index(half - 1));
  even(0, 0) = 1.0;
  even(as_index(half), as_index(half)) = 1.0;
  for (std::size_t m = 1; m < half; ++m) {
    even(as_index(m), as_index(m)) = r;
    even(as_index(dim - m), as_index(m)) = r;
    odd(as_index(m), as_index(m - 1)) = r;
    odd(as_index(dim - m), as_index(m - 1)) = -r;
  }
  return {even.adjoint() * u * even, odd.adjoint() * u * odd};
}

}  // namespace qchaos
