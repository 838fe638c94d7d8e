#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "qchaos/floquet.hpp"
#include "qchaos/imperfections.hpp"
#include "qchaos/sawtooth.hpp"

using namespace qchaos;
using testutil::max_abs_diff;

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

CVector to_vector(const StateVector& s) {
  CVector v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t m = 0; m < s.dim(); ++m) v(static_cast<Eigen::Index>(m)) = s[m];
  return v;
}

ImperfectionParams amplitudes(double delta, double j) {
  ImperfectionParams p;
  p.delta = delta;
  p.coupling = j;
  return p;
}

}  // namespace

TEST_CASE("disorder sampling") {
  const auto zero = sample_disorder(5, amplitudes(0, 0), 42, 0);
  for (double d : zero.detuning) CHECK(d == 0.0);
  for (double j : zero.coupling) CHECK(j == 0.0);
  CHECK(zero.coupling.size() == 4);
  CHECK_FALSE(zero.has_coupling());

  const auto a = sample_disorder(6, amplitudes(0.3, 0.2), 42, 17);
  const auto b = sample_disorder(6, amplitudes(0.3, 0.2), 42, 17);
  CHECK(a.detuning == b.detuning);
  CHECK(a.coupling == b.coupling);
  for (double d : a.detuning) CHECK(std::fabs(d) <= 0.15);
  for (double j : a.coupling) CHECK(std::fabs(j) <= 0.2);

  // common random numbers: the pattern scales with the amplitude
  const auto c = sample_disorder(6, amplitudes(0.6, 0.4), 42, 17);
  for (std::size_t i = 0; i < 6; ++i) CHECK(c.detuning[i] == doctest::Approx(2 * a.detuning[i]));

  double sum = 0.0, lo = 0.0, hi = 0.0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    const double d = sample_disorder(2, amplitudes(2.0, 0.0), 7, static_cast<std::uint64_t>(k)).detuning[0];
    sum += d;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  CHECK(std::fabs(sum / draws) < 0.01);
  CHECK(lo >= -1.0);
  CHECK(hi <= 1.0);
  CHECK(lo < -0.99);
  CHECK(hi > 0.99);
  CHECK_THROWS_AS(sample_disorder(3, amplitudes(-1.0, 0.0), 1, 0), ConfigError);
}

TEST_CASE("static Hamiltonian against Kronecker-product construction") {
  const CMatrix id = CMatrix::Identity(2, 2);
  CMatrix sz(2, 2), sx(2, 2);
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;

  DisorderRealization one{1, {0.37}, {}, 0};
  const Eigen::SelfAdjointEigenSolver<CMatrix> e1(build_static_hamiltonian(one));
  CHECK(e1.eigenvalues()(0) == doctest::Approx(-0.37));
  CHECK(e1.eigenvalues()(1) == doctest::Approx(0.37));

  const double g = 0.8;
  DisorderRealization two{2, {0.0, 0.0}, {g}, 0};
  const CMatrix h2 = build_static_hamiltonian(two);
  CHECK(max_abs_diff(h2, g * kron(sx, sx)) < 1e-15);
  const Eigen::SelfAdjointEigenSolver<CMatrix> e2(h2);
  CHECK(e2.eigenvalues()(0) == doctest::Approx(-g));
  CHECK(e2.eigenvalues()(1) == doctest::Approx(-g));
  CHECK(e2.eigenvalues()(2) == doctest::Approx(g));
  CHECK(e2.eigenvalues()(3) == doctest::Approx(g));

  const auto r = sample_disorder(3, amplitudes(0.5, 0.4), 3, 1);
  const CMatrix ref = r.detuning[0] * kron(kron(sz, id), id) + r.detuning[1] * kron(kron(id, sz), id) +
                      r.detuning[2] * kron(kron(id, id), sz) + r.coupling[0] * kron(kron(sx, sx), id) +
                      r.coupling[1] * kron(kron(id, sx), sx);
  const CMatrix h3 = build_static_hamiltonian(r);
  CHECK(max_abs_diff(h3, ref) < 1e-15);
  CHECK(std::abs(h3.trace()) < 1e-10);
  CHECK(max_abs_diff(h3, h3.adjoint()) == 0.0);

  const auto diag_only = sample_disorder(4, amplitudes(0.5, 0.0), 3, 2);
  const CMatrix hd = build_static_hamiltonian(diag_only);
  CHECK(max_abs_diff(hd, CMatrix(hd.diagonal().asDiagonal())) == 0.0);
  double e0 = 0.0;
  for (double d : diag_only.detuning) e0 += d;
  CHECK(hd(0, 0).real() == doctest::Approx(e0));
}

TEST_CASE("propagator") {
  const auto r = sample_disorder(3, amplitudes(0.9, 0.7), 11, 4);
  const CMatrix h = build_static_hamiltonian(r);
  CHECK(max_abs_diff(make_propagator(h, 0.0).dense(), CMatrix::Identity(8, 8)) < 1e-14);
  const CMatrix ep = make_propagator(h, 1.3).dense();
  const CMatrix em = make_propagator(h, -1.3).dense();
  CHECK(max_abs_diff(ep * em, CMatrix::Identity(8, 8)) < 1e-11);
  CHECK(max_abs_diff(ep, testutil::taylor_expm(h, 1.3)) < 1e-10);
  CHECK(max_abs_diff(make_propagator(r, 1.3).dense(), ep) < 1e-12);
  CHECK(unitarity_residual(ep) < 1e-10);

  const auto rd = sample_disorder(4, amplitudes(0.9, 0.0), 11, 5);
  const auto fast = make_propagator(rd, 1.0);
  CHECK(fast.is_diagonal());
  CHECK(max_abs_diff(fast.dense(), make_propagator(build_static_hamiltonian(rd), 1.0).dense()) < 1e-12);

  CMatrix bad = CMatrix::Zero(4, 4);
  bad(0, 1) = cplx{0.0, 1.0};
  CHECK_THROWS_AS(make_propagator(bad, 1.0), ContractError);
}

TEST_CASE("propagator column application matches dense product") {
  std::mt19937_64 rng(4);
  const auto r = sample_disorder(5, amplitudes(0.4, 0.4), 2, 9);
  const auto e = make_propagator(r, 1.0);
  CHECK(e.sectors().size() == 2);
  CMatrix block = testutil::random_unitary(32, rng).leftCols(5);
  const CMatrix expected = e.dense() * block;
  e.apply_columns(block);
  CHECK(max_abs_diff(block, expected) < 1e-13);
  auto v = testutil::random_state(32, rng);
  CVector vv = Eigen::Map<CVector>(v.data(), 32);
  const CVector ev = e.dense() * vv;
  e.apply(v);
  CHECK(max_abs_diff(Eigen::Map<CVector>(v.data(), 32), ev) < 1e-13);
}

TEST_CASE("perturbed iteration") {
  std::mt19937_64 rng(8);
  const auto p = make_params(std::sqrt(2.0), 5);
  const auto seq = compile_iteration(p);
  const CMatrix u0 = oracle_floquet(p);

  StateVector s(5, testutil::random_state(32, rng));
  const CVector in = to_vector(s);
  run_perturbed_iteration(s, seq, InterGatePropagator::identity(5));
  CHECK(max_abs_diff(to_vector(s), u0 * in) < 1e-10);

  StateVector z(5, std::vector<cplx>(in.data(), in.data() + 32));
  run_perturbed_iteration(z, seq, make_propagator(sample_disorder(5, amplitudes(0, 0), 1, 0), 1.0));
  CHECK(max_abs_diff(to_vector(z), u0 * in) < 1e-10);

  for (double j : {0.0, 1e-3}) {
    StateVector w(5, testutil::random_state(32, rng));
    run_perturbed_iteration(w, seq, make_propagator(sample_disorder(5, amplitudes(1e-3, j), 1, 3), 1.0));
    CHECK(std::fabs(w.norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("perturbed operator converges linearly to the ideal one") {
  const auto p = make_params(std::sqrt(2.0), 5);
  const auto seq = compile_iteration(p);
  const CMatrix u0 = build_floquet(seq, nullptr);
  auto deviation = [&](double eps) {
    const auto e = make_propagator(sample_disorder(5, amplitudes(eps, eps), 5, 0), 1.0);
    return max_abs_diff(build_floquet(seq, &e), u0);
  };
  const double d1 = deviation(1e-8) / 1e-8;
  const double d2 = deviation(1e-7) / 1e-7;
  CHECK(d1 / d2 > 1.0 / 3.0);
  CHECK(d1 / d2 < 3.0);
}
