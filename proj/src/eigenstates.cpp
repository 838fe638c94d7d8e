#include "qchaos/eigenstates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qchaos/spectral.hpp"

namespace qchaos {

double orthonormality_residual(const CMatrix& v) {
  CMatrix g = v.adjoint() * v;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

OverlapMatrix overlaps(const CMatrix& ideal, const CMatrix& perturbed) {
  if (ideal.rows() != perturbed.rows() || ideal.cols() != perturbed.cols() || ideal.rows() != ideal.cols()) {
    throw ContractError("overlaps: eigenvector matrices must be square and of equal size");
  }
  for (const CMatrix* v : {&ideal, &perturbed}) {
    const double r = orthonormality_residual(*v);
    if (r > 1e-8) {
      std::ostringstream msg;
      msg << "overlaps: columns not orthonormal (residual " << r << ")";
      throw ContractError(msg.str());
    }
  }
  return (ideal.adjoint() * perturbed).cwiseAbs2().transpose();
}

EntropyResult entropy(const OverlapMatrix& p) {
  EntropyResult out;
  out.per_state.resize(static_cast<std::size_t>(p.rows()));
  double sum = 0.0;
  for (Eigen::Index a = 0; a < p.rows(); ++a) {
    const double row = p.row(a).sum();
    if (std::fabs(row - 1.0) > 1e-6) {
      std::ostringstream msg;
      msg << "entropy: row " << a << " sums to " << row;
      throw ContractError(msg.str());
    }
    double s = 0.0;
    for (Eigen::Index b = 0; b < p.cols(); ++b) {
      const double x = p(a, b);
      if (x > 0.0) s -= x * std::log2(x);
    }
    out.per_state[static_cast<std::size_t>(a)] = s;
    sum += s;
  }
  out.mean = p.rows() > 0 ? sum / static_cast<double>(p.rows()) : 0.0;
  return out;
}

double entropy_border(const std::vector<double>& eps, const std::vector<double>& mean_entropy, double level) {
  CrossoverCurve curve{eps, mean_entropy, {}};
  return threshold_crossing(curve, level, Crossing::Upward);
}

int default_husimi_points(std::size_t dim) {
  const int pts = 4 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dim))));
  return std::min(256, pts);
}

HusimiGrid husimi(const StateVector& state, const MapParams& p, int n_theta, int n_p) {
  if (static_cast<std::size_t>(state.dim()) != p.dim) throw ContractError("husimi: state size mismatch");
  if (n_theta < 1 || n_p < 1) throw ConfigError("husimi: grid must be non-empty");
  const std::size_t dim = p.dim;
  const double width = std::sqrt(0.5 * p.period);  // Delta theta = Delta p = sqrt(T/2)
  const double cutoff = width * std::sqrt(4.0 * std::log(1e15));
  constexpr int kWindings = 5;

  HusimiGrid grid;
  grid.n_theta = n_theta;
  grid.n_p = n_p;
  grid.density.assign(static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_p), 0.0);
  const auto amp = state.amplitudes();

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_theta; ++i) {
    const double theta_c = grid.theta(i);
    // Gaussian support of the periodized envelope around theta_c.
    struct Term {
      std::size_t m;
      double x;
      double g;
    };
    std::vector<Term> terms;
    for (int w = -kWindings; w <= kWindings; ++w) {
      for (std::size_t m = 0; m < dim; ++m) {
        const double x = kTwoPi * static_cast<double>(m) / static_cast<double>(dim) - theta_c + kTwoPi * w;
        if (std::fabs(x) <= cutoff) terms.push_back({m, x, std::exp(-x * x / (4.0 * width * width))});
      }
    }
    std::vector<cplx> coherent(dim);
    for (int j = 0; j < n_p; ++j) {
      const double n_c = grid.p(j) / p.period;
      std::fill(coherent.begin(), coherent.end(), cplx{0.0, 0.0});
      for (const auto& t : terms) coherent[t.m] += t.g * std::polar(1.0, n_c * t.x);
      double norm2 = 0.0;
      cplx ov{0.0, 0.0};
      for (std::size_t m = 0; m < dim; ++m) {
        norm2 += std::norm(coherent[m]);
        ov += std::conj(coherent[m]) * amp[m];
      }
      grid.density[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_p) + static_cast<std::size_t>(j)] =
          norm2 > 0.0 ? std::norm(ov) / norm2 : 0.0;
    }
  }

  double total = 0.0;
  for (double d : grid.density) total += d;
  grid.normalization = total * grid.cell_area();
  if (grid.normalization > 0.0) {
    for (auto& d : grid.density) d /= grid.normalization;
  }
  return grid;
}

}  // namespace qchaos
