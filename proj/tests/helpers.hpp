// Test-side utilities: random inputs and independent reference constructions.
#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qchaos/common.hpp"

namespace testutil {

using qchaos::cplx;
using qchaos::CMatrix;

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline std::vector<cplx> random_state(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(dim);
  double norm = 0.0;
  for (auto& a : v) {
    a = {g(rng), g(rng)};
    norm += std::norm(a);
  }
  for (auto& a : v) a /= std::sqrt(norm);
  return v;
}

/// Haar-like unitary from the QR decomposition of a complex Gaussian matrix.
inline CMatrix random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix z(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) z(i, j) = {g(rng), g(rng)};
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) q.col(j) *= std::polar(1.0, std::arg(r(j, j)));
  return q;
}

/// Dense DFT with kernel exp(+2 pi i m n / N) / sqrt(N), built from scratch.
inline CMatrix reference_dft(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix f(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const long double angle = 2.0L * 3.141592653589793238462643383279502884L * static_cast<long double>((r * c) % n) /
                                static_cast<long double>(n);
      f(r, c) = cplx{static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))} /
                std::sqrt(static_cast<double>(dim));
    }
  }
  return f;
}

/// exp(-i H t) by a 50-term Taylor series with scaling and squaring.
inline CMatrix taylor_expm(const CMatrix& h, double t) {
  CMatrix a = cplx{0.0, -t} * h;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::ldexp(1.0, squarings) > 0.5) ++squarings;
  a /= std::ldexp(1.0, squarings);
  CMatrix sum = CMatrix::Identity(h.rows(), h.cols());
  CMatrix term = sum;
  for (int k = 1; k <= 50; ++k) {
    term = (term * a / static_cast<double>(k)).eval();
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
  return sum;
}

}  // namespace testutil
