#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "qchaos/qcore.hpp"
#include "qchaos/sawtooth.hpp"

using namespace qchaos;
using testutil::max_abs_diff;

namespace {

std::vector<Gate> sample_gates(int nq) {
  return {Hadamard{1},
          Hadamard{nq},
          ControlledPhase{1, nq, 0.7},
          ControlledPhase{nq, 2, -1.3},
          PairPhase{1, 2, 3.1, 0.5, 0.25, -0.1, 0.2},
          PairPhase{2, 2, -2.0, 0.5, 0.5, 0.3, 0.3}};
}

CVector to_vector(const StateVector& s) {
  CVector v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t m = 0; m < s.dim(); ++m) v(static_cast<Eigen::Index>(m)) = s[m];
  return v;
}

}  // namespace

TEST_CASE("Hadamard on the all-zero state") {
  StateVector s(3);
  apply_gate(s, Hadamard{1});
  CHECK(std::abs(s[0] - cplx{M_SQRT1_2, 0}) < 1e-15);
  CHECK(std::abs(s[4] - cplx{M_SQRT1_2, 0}) < 1e-15);
  CHECK(std::abs(s[1]) == 0.0);
}

TEST_CASE("kick PairPhase on |00> carries k pi^2 / (2 n_q^2)") {
  const auto p = make_params(std::sqrt(2.0), 4);
  const auto seq = compile_iteration(p);
  for (const auto& sg : seq) {
    if (sg.block != Block::Kick) continue;
    StateVector s(4);
    apply_gate(s, sg.gate);
    const double expected = p.kick * kPi * kPi / (2.0 * 16.0);
    CHECK(std::abs(s[0] - std::polar(1.0, expected)) < 1e-12);
  }
}

TEST_CASE("gate followed by its inverse is the identity") {
  std::mt19937_64 rng(1);
  for (const auto& g : sample_gates(4)) {
    StateVector s(4, testutil::random_state(16, rng));
    const StateVector orig = s;
    apply_gate(s, g);
    apply_gate(s, inverse(g));
    for (std::size_t m = 0; m < 16; ++m) CHECK(std::abs(s[m] - orig[m]) < 1e-12);
  }
}

TEST_CASE("qubit index out of range is a configuration error") {
  StateVector s(3);
  CHECK_THROWS_AS(apply_gate(s, Hadamard{0}), ConfigError);
  CHECK_THROWS_AS(apply_gate(s, Hadamard{4}), ConfigError);
  CHECK_THROWS_AS(apply_gate(s, ControlledPhase{1, 1, 0.3}), ConfigError);
  CHECK_THROWS_AS(apply_gate(s, PairPhase{1, 5, 1, 1, 1, 0, 0}), ConfigError);
}

TEST_CASE("qft of the zero state is uniform and inverts") {
  for (int nq = 2; nq <= 6; ++nq) {
    StateVector s(nq);
    qft(s, false);
    for (std::size_t m = 0; m < s.dim(); ++m) CHECK(std::abs(s[m] - 1.0 / std::sqrt(double(s.dim()))) < 1e-12);
    std::mt19937_64 rng(nq);
    StateVector r(nq, testutil::random_state(s.dim(), rng));
    const StateVector orig = r;
    qft(r, false);
    qft(r, true);
    for (std::size_t m = 0; m < r.dim(); ++m) CHECK(std::abs(r[m] - orig[m]) < 1e-12);
  }
}

TEST_CASE("qft matches a dense DFT matrix") {
  std::mt19937_64 rng(7);
  for (int nq = 1 + 1; nq <= 6; ++nq) {
    const std::size_t dim = std::size_t{1} << nq;
    const CMatrix f = testutil::reference_dft(dim);
    StateVector s(nq, testutil::random_state(dim, rng));
    const CVector in = to_vector(s);
    qft(s, false);
    CHECK(max_abs_diff(to_vector(s), f * in) < 1e-12);
    StateVector t(nq, testutil::random_state(dim, rng));
    const CVector in2 = to_vector(t);
    qft(t, true);
    CHECK(max_abs_diff(to_vector(t), f.adjoint() * in2) < 1e-12);
  }
}

TEST_CASE("qft circuit gate count") {
  for (int nq = 2; nq <= 8; ++nq) {
    const auto c = qft_circuit(nq, false);
    CHECK(c.size() == static_cast<std::size_t>(nq + nq * (nq - 1) / 2));
    int hadamards = 0;
    for (const auto& g : c) hadamards += std::holds_alternative<Hadamard>(g);
    CHECK(hadamards == nq);
  }
}

TEST_CASE("gate_matrix agrees with apply_gate") {
  std::mt19937_64 rng(3);
  const int nq = 4;
  for (const auto& g : sample_gates(nq)) {
    const CMatrix m = gate_matrix(g, nq);
    for (int trial = 0; trial < 100; ++trial) {
      StateVector s(nq, testutil::random_state(16, rng));
      const CVector in = to_vector(s);
      apply_gate(s, g);
      CHECK(max_abs_diff(to_vector(s), m * in) < 1e-12);
    }
  }
}

TEST_CASE("gate matrix structure") {
  const CMatrix h = gate_matrix(Hadamard{2}, 3);
  CHECK(max_abs_diff(h * h, CMatrix::Identity(8, 8)) < 1e-15);
  const CMatrix d = gate_matrix(PairPhase{1, 3, 2.3, 0.5, 0.125, 0.1, -0.4}, 3);
  for (Eigen::Index i = 0; i < 8; ++i) {
    for (Eigen::Index j = 0; j < 8; ++j) {
      if (i == j) {
        CHECK(std::abs(std::abs(d(i, j)) - 1.0) < 1e-15);
      } else {
        CHECK(d(i, j) == cplx{0.0, 0.0});
      }
    }
  }
  const auto diag = diagonal_of(PairPhase{1, 3, 2.3, 0.5, 0.125, 0.1, -0.4}, 3);
  for (Eigen::Index i = 0; i < 8; ++i) CHECK(std::abs(diag[static_cast<std::size_t>(i)] - d(i, i)) < 1e-15);
}

TEST_CASE("apply_gate is linear and norm preserving") {
  std::mt19937_64 rng(5);
  const int nq = 5;
  const cplx alpha{0.3, -1.1};
  const cplx beta{-0.7, 0.2};
  for (const auto& g : sample_gates(nq)) {
    const auto u = testutil::random_state(32, rng);
    const auto v = testutil::random_state(32, rng);
    std::vector<cplx> w(32);
    for (std::size_t m = 0; m < 32; ++m) w[m] = alpha * u[m] + beta * v[m];
    StateVector su(nq, u), sv(nq, v), sw(nq, w);
    apply_gate(su, g);
    apply_gate(sv, g);
    apply_gate(sw, g);
    for (std::size_t m = 0; m < 32; ++m) CHECK(std::abs(sw[m] - (alpha * su[m] + beta * sv[m])) < 1e-12);
    CHECK(std::abs(su.norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("column kernels match the serial single-vector kernels") {
  std::mt19937_64 rng(11);
  const int nq = 5;
  const CMatrix block = testutil::random_unitary(32, rng).leftCols(9);
  for (const auto& g : sample_gates(nq)) {
    CMatrix par = block;
    kernels::apply_columns(par, nq, g);
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
      StateVector s(nq, std::vector<cplx>(block.col(c).data(), block.col(c).data() + 32));
      apply_gate(s, g);
      CHECK(max_abs_diff(to_vector(s), par.col(c)) < 1e-14);
    }
  }
}
