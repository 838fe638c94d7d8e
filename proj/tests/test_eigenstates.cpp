#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "qchaos/eigenstates.hpp"
#include "qchaos/floquet.hpp"

using namespace qchaos;

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d2 += (ra[k] - rb[k]) * (ra[k] - rb[k]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace

TEST_CASE("overlap matrix") {
  std::mt19937_64 rng(12);
  const CMatrix v0 = testutil::random_unitary(32, rng);
  const auto same = overlaps(v0, v0);
  CHECK((same - RMatrix::Identity(32, 32)).cwiseAbs().maxCoeff() < 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    const auto p = overlaps(testutil::random_unitary(32, rng), testutil::random_unitary(32, rng));
    CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-8);
    CHECK((p.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-8);
    CHECK(p.minCoeff() >= 0.0);
  }

  CMatrix rot = v0;
  rot.col(3) = (v0.col(3) + v0.col(7)) / std::sqrt(2.0);
  rot.col(7) = (v0.col(3) - v0.col(7)) / std::sqrt(2.0);
  const auto p = overlaps(v0, rot);
  CHECK(p(3, 3) == doctest::Approx(0.5));
  CHECK(p(3, 7) == doctest::Approx(0.5));
  CHECK(p(7, 3) == doctest::Approx(0.5));
  CHECK(p(7, 7) == doctest::Approx(0.5));
  const auto s = entropy(p);
  CHECK(s.per_state[3] == doctest::Approx(1.0));
  CHECK(s.per_state[0] == doctest::Approx(0.0));

  CMatrix bad = v0;
  bad.col(0) *= 1.1;
  CHECK_THROWS_AS(overlaps(v0, bad), ContractError);
}

TEST_CASE("entropy values") {
  RMatrix uniform = RMatrix::Constant(16, 16, 1.0 / 16);
  CHECK(entropy(uniform).mean == doctest::Approx(4.0));
  CHECK(entropy(RMatrix::Identity(8, 8)).mean == 0.0);
  RMatrix bad = RMatrix::Identity(4, 4);
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(entropy(bad), ContractError);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto e = entropy(overlaps(testutil::random_unitary(16, rng), testutil::random_unitary(16, rng)));
    for (double v : e.per_state) {
      CHECK(v >= 0.0);
      CHECK(v <= 4.0 + 1e-12);
    }
  }
}

TEST_CASE("entropy border") {
  const double star = 2e-3;
  std::vector<double> eps, s;
  for (int k = -40; k <= -8; ++k) {
    eps.push_back(std::pow(10.0, k / 8.0));
    s.push_back(2.0 * eps.back() / star);
  }
  CHECK(entropy_border(eps, s) == doctest::Approx(star / 2).epsilon(1e-9));
  CHECK_THROWS_AS(entropy_border({1e-3, 1e-2}, {0.1, 0.2}), RangeError);
}

TEST_CASE("mean entropy grows with eps along a fixed realization") {
  const auto p = make_params(-0.1, 5, std::sqrt(2.0) / 5, std::sqrt(2.0) / 5);
  const auto seq = compile_iteration(p);
  const auto v0 = diagonalize(build_floquet(seq, nullptr)).eigenvectors;
  std::vector<double> eps, mean;
  for (int k = -40; k <= -8; k += 2) {
    ImperfectionParams ip;
    ip.delta = std::pow(10.0, k / 8.0);
    const auto e = make_propagator(sample_disorder(5, ip, 3, 0), 1.0);
    eps.push_back(ip.delta);
    mean.push_back(entropy(overlaps(v0, diagonalize(build_floquet(seq, &e)).eigenvectors)).mean);
  }
  CHECK(spearman(eps, mean) > 0.95);
  CHECK(mean.front() < 0.05);
}

TEST_CASE("husimi of a momentum eigenstate") {
  const int nq = 6;
  const auto p = make_params(std::sqrt(2.0), nq);
  const int n0 = 5;
  std::vector<cplx> amp(p.dim);
  for (std::size_t m = 0; m < p.dim; ++m) amp[m] = std::polar(1.0 / std::sqrt(64.0), n0 * kTwoPi * m / 64.0);
  const auto g = husimi(StateVector(nq, amp), p, 32, 128);
  double total = 0.0;
  for (double d : g.density) {
    CHECK(d >= 0.0);
    total += d;
  }
  CHECK(total * g.cell_area() == doctest::Approx(1.0).epsilon(1e-6));
  // theta independent
  for (int j = 0; j < g.n_p; ++j) {
    for (int i = 1; i < g.n_theta; ++i) CHECK(std::fabs(g.at(i, j) - g.at(0, j)) < 1e-8 * (1.0 + g.at(0, j)));
  }
  int best = 0;
  for (int j = 0; j < g.n_p; ++j) best = g.at(0, j) > g.at(0, best) ? j : best;
  CHECK(std::fabs(g.p(best) - p.period * n0) <= kTwoPi / g.n_p);
}

TEST_CASE("husimi of the uniform superposition sits on p = 0") {
  const int nq = 4;
  const auto p = make_params(std::sqrt(2.0), nq);
  const std::vector<cplx> amp(16, cplx{0.25, 0.0});
  const auto g = husimi(StateVector(nq, amp), p, 64, 64);
  double near = 0.0, total = 0.0;
  for (int i = 0; i < g.n_theta; ++i) {
    for (int j = 0; j < g.n_p; ++j) {
      total += g.at(i, j);
      if (std::fabs(g.p(j)) < 1.0) near += g.at(i, j);
    }
  }
  CHECK(near / total > 0.9);
}

TEST_CASE("husimi normalization and phase invariance") {
  std::mt19937_64 rng(6);
  const auto p = make_params(std::sqrt(2.0), 6);
  auto amp = testutil::random_state(64, rng);
  const auto g = husimi(StateVector(6, amp), p, 128, 128);
  double total = 0.0;
  for (double d : g.density) total += d;
  CHECK(total * g.cell_area() == doctest::Approx(1.0).epsilon(1e-6));
  for (auto& a : amp) a *= std::polar(1.0, 0.77);
  const auto h = husimi(StateVector(6, amp), p, 128, 128);
  for (std::size_t k = 0; k < g.density.size(); ++k) CHECK(std::fabs(g.density[k] - h.density[k]) < 1e-12);
  CHECK(default_husimi_points(64) == 32);
  CHECK(default_husimi_points(std::size_t{1} << 12) == 256);
}
