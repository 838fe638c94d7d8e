#include "qchaos/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qchaos {

namespace {

const double kSqrtPi = std::sqrt(kPi);

// Bisection on a monotone CDF.
double invert_cdf(Surmise kind, double u) {
  double lo = 0.0;
  double hi = 1.0;
  while (surmise_cdf(kind, hi) < u) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (surmise_cdf(kind, mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void check_count(std::uint64_t n, std::size_t min_count) {
  if (n < min_count) {
    throw StatisticalError("spacing sample of size " + std::to_string(n) + " below minimum " +
                           std::to_string(min_count));
  }
}

}  // namespace

double surmise_density(Surmise kind, double s) {
  if (!(s >= 0.0)) throw ContractError("surmise_density: s must be >= 0");
  switch (kind) {
    case Surmise::GOE:
      return 0.5 * kPi * s * std::exp(-0.25 * kPi * s * s);
    case Surmise::GOE2:
      return 0.5 * (std::erfc(0.25 * kSqrtPi * s) * 0.25 * kPi * s * std::exp(-kPi * s * s / 16.0) +
                    std::exp(-kPi * s * s / 8.0));
    case Surmise::GUE:
      return 32.0 * s * s / (kPi * kPi) * std::exp(-4.0 * s * s / kPi);
  }
  return 0.0;
}

double surmise_cdf(Surmise kind, double s) {
  if (!(s >= 0.0)) throw ContractError("surmise_cdf: s must be >= 0");
  switch (kind) {
    case Surmise::GOE:
      return -std::expm1(-0.25 * kPi * s * s);
    case Surmise::GOE2:
      // P_O2 = -d/ds [erfc(x) exp(-x^2)] with x = sqrt(pi) s / 4
      return 1.0 - std::erfc(0.25 * kSqrtPi * s) * std::exp(-kPi * s * s / 16.0);
    case Surmise::GUE:
      return std::erf(2.0 * s / kSqrtPi) - 4.0 * s / kPi * std::exp(-4.0 * s * s / kPi);
  }
  return 0.0;
}

double crossover_point() {
  static const double s0 = [] {
    auto diff = [](double s) { return surmise_density(Surmise::GOE2, s) - surmise_density(Surmise::GUE, s); };
    double lo = 0.1;
    double hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (diff(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return s0;
}

std::vector<double> spacings(std::span<const double> lambda) {
  const std::size_t n = lambda.size();
  if (n < 2) throw ContractError("spacings: need at least two phases");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(lambda[k] >= 0.0 && lambda[k] < kTwoPi)) throw ContractError("spacings: phase outside [0, 2 pi)");
    if (k > 0 && lambda[k] < lambda[k - 1]) throw ContractError("spacings: phases not sorted");
  }
  const double scale = static_cast<double>(n) / kTwoPi;
  std::vector<double> s(n);
  for (std::size_t k = 0; k + 1 < n; ++k) s[k] = scale * (lambda[k + 1] - lambda[k]);
  s[n - 1] = scale * (lambda[0] + kTwoPi - lambda[n - 1]);
  return s;
}

void SpacingHistogram::add(double s) {
  const int bin = std::min(kBins - 1, static_cast<int>(s / kBinWidth));
  ++counts[static_cast<std::size_t>(std::max(0, bin))];
  if (s <= crossover_point()) ++below_crossover;
  ++total;
}

void SpacingHistogram::add(std::span<const double> s) {
  for (double x : s) add(x);
}

void SpacingHistogram::merge(const SpacingHistogram& other) {
  for (std::size_t b = 0; b < counts.size(); ++b) counts[b] += other.counts[b];
  below_crossover += other.below_crossover;
  total += other.total;
}

double SpacingHistogram::density(int bin) const {
  if (total == 0) return 0.0;
  return static_cast<double>(counts[static_cast<std::size_t>(bin)]) / (static_cast<double>(total) * kBinWidth);
}

SpacingHistogram SpacingSample::histogram() const {
  SpacingHistogram h;
  h.add(s);
  return h;
}

double eta(const SpacingHistogram& h, std::size_t min_count) {
  check_count(h.total, min_count);
  const double s0 = crossover_point();
  const double fu = surmise_cdf(Surmise::GUE, s0);
  const double fo2 = surmise_cdf(Surmise::GOE2, s0);
  const double f = static_cast<double>(h.below_crossover) / static_cast<double>(h.total);
  return (f - fu) / (fo2 - fu);
}

double eta(const SpacingSample& sample, std::size_t min_count) {
  return eta(sample.histogram(), min_count);
}

double eta_tilde(const SpacingHistogram& h, std::size_t min_count) {
  check_count(h.total, min_count);
  using H = SpacingHistogram;
  double sum = 0.0;
  for (int b = 0; b < H::kBins; ++b) {
    const double lo = b * H::kBinWidth;
    const double hi = (b + 1) * H::kBinWidth;
    const double upper = b == H::kBins - 1 ? 1.0 : surmise_cdf(Surmise::GUE, hi);
    const double pu = (upper - surmise_cdf(Surmise::GUE, lo)) / H::kBinWidth;
    const double d = h.density(b) - pu;
    sum += d * d * H::kBinWidth;
  }
  return std::sqrt(sum);
}

double eta_tilde(const SpacingSample& sample, std::size_t min_count) {
  return eta_tilde(sample.histogram(), min_count);
}

void CrossoverCurve::validate() const {
  if (eps.size() != value.size()) throw ContractError("crossover curve: length mismatch");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) throw ContractError("crossover curve: eps must be positive");
    if (k > 0 && !(eps[k] > eps[k - 1])) throw ContractError("crossover curve: eps must increase");
  }
}

double threshold_crossing(const CrossoverCurve& curve, double threshold, Crossing direction) {
  curve.validate();
  const auto above = [&](double v) { return direction == Crossing::Downward ? v >= threshold : v < threshold; };
  for (std::size_t k = 0; k + 1 < curve.eps.size(); ++k) {
    const double v0 = curve.value[k];
    const double v1 = curve.value[k + 1];
    if (above(v0) && !above(v1)) {
      const double t = v0 == v1 ? 0.0 : (v0 - threshold) / (v0 - v1);
      const double l0 = std::log(curve.eps[k]);
      const double l1 = std::log(curve.eps[k + 1]);
      return std::exp(l0 + t * (l1 - l0));
    }
  }
  std::ostringstream msg;
  msg << "no " << (direction == Crossing::Downward ? "downward" : "upward") << " crossing of " << threshold
      << " in eps range";
  if (!curve.eps.empty()) msg << " [" << curve.eps.front() << ", " << curve.eps.back() << "]";
  msg << "; widen the eps grid";
  throw RangeError(msg.str());
}

double eps_chi(const CrossoverCurve& curve, double threshold) {
  return threshold_crossing(curve, threshold, Crossing::Downward);
}

double ScalingFit::predict(int n) const {
  const double poly = std::pow(static_cast<double>(n), -2.5);
  switch (model) {
    case ScalingModel::Ergodic:
      return constant * std::exp2(-0.5 * n) * poly;
    case ScalingModel::Integrable:
      return constant * poly;
    case ScalingModel::FreeExponent:
      return constant * std::exp2(slope * n) * poly;
  }
  return 0.0;
}

ScalingFit fit_scaling(std::span<const ScalingPoint> points, ScalingModel model) {
  if (points.size() < 3) throw ConfigError("fit_scaling: need at least 3 points");
  std::vector<double> x;
  std::vector<double> y;  // log2(eps n^(5/2))
  for (const auto& pt : points) {
    if (!(pt.eps > 0.0) || !std::isfinite(pt.eps) || pt.n_qubits < 1) {
      throw ConfigError("fit_scaling: points need positive eps and qubit counts");
    }
    x.push_back(pt.n_qubits);
    y.push_back(std::log2(pt.eps) + 2.5 * std::log2(static_cast<double>(pt.n_qubits)));
  }
  const double n = static_cast<double>(x.size());
  ScalingFit fit;
  fit.model = model;
  double intercept = 0.0;
  switch (model) {
    case ScalingModel::Ergodic: {
      for (std::size_t k = 0; k < x.size(); ++k) intercept += y[k] + 0.5 * x[k];
      intercept /= n;
      fit.slope = -0.5;
      break;
    }
    case ScalingModel::Integrable: {
      intercept = std::accumulate(y.begin(), y.end(), 0.0) / n;
      fit.slope = 0.0;
      break;
    }
    case ScalingModel::FreeExponent: {
      const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
      const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
      double sxx = 0.0;
      double sxy = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
      }
      if (sxx == 0.0) throw ConfigError("fit_scaling: all points share one qubit count");
      fit.slope = sxy / sxx;
      intercept = my - fit.slope * mx;
      break;
    }
  }
  fit.constant = std::exp2(intercept);
  double ss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = std::log(points[k].eps) - std::log(fit.predict(points[k].n_qubits));
    fit.log_residuals.push_back(r);
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

ScalingModel parse_scaling_model(const std::string& name) {
  if (name == "ergodic") return ScalingModel::Ergodic;
  if (name == "integrable") return ScalingModel::Integrable;
  if (name == "free" || name == "free-exponent") return ScalingModel::FreeExponent;
  throw ConfigError("unknown scaling model '" + name + "'");
}

std::string to_string(ScalingModel model) {
  switch (model) {
    case ScalingModel::Ergodic:
      return "ergodic";
    case ScalingModel::Integrable:
      return "integrable";
    case ScalingModel::FreeExponent:
      return "free-exponent";
  }
  return "?";
}

double sample_surmise(Surmise kind, CounterRng& rng) {
  const double u = rng.uniform();
  if (kind == Surmise::GOE) return std::sqrt(-4.0 * std::log1p(-u) / kPi);
  return invert_cdf(kind, u);
}

std::vector<double> sample_superposed_goe(std::size_t n_spacings, CounterRng& rng) {
  // Each component has half the level density (mean spacing 2). The merged
  // sequence is cut to the range covered by both components.
  const auto margin = static_cast<std::size_t>(8.0 * std::sqrt(static_cast<double>(n_spacings))) + 64;
  const std::size_t per_component = n_spacings / 2 + margin;
  std::vector<double> levels;
  levels.reserve(2 * per_component + 2);
  double end_a = 0.0;
  double end_b = 0.0;
  for (int comp = 0; comp < 2; ++comp) {
    double x = 2.0 * rng.uniform();
    for (std::size_t k = 0; k < per_component; ++k) {
      levels.push_back(x);
      x += 2.0 * sample_surmise(Surmise::GOE, rng);
    }
    (comp == 0 ? end_a : end_b) = levels.back();
  }
  const double end = std::min(end_a, end_b);
  std::sort(levels.begin(), levels.end());
  while (!levels.empty() && levels.back() > end) levels.pop_back();
  std::vector<double> s;
  s.reserve(levels.size());
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) s.push_back(levels[k + 1] - levels[k]);
  if (s.size() > n_spacings) s.resize(n_spacings);
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  for (auto& v : s) v /= mean;
  return s;
}

}  // namespace qchaos
