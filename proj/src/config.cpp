#include "qchaos/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qchaos/common.hpp"

namespace qchaos {

using nlohmann::json;

Statistic parse_statistic(const std::string& name) {
  if (name == "eta") return Statistic::Eta;
  if (name == "eta-tilde" || name == "eta_tilde") return Statistic::EtaTilde;
  if (name == "entropy") return Statistic::Entropy;
  throw ConfigError("unknown statistic '" + name + "'");
}

std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::Eta:
      return "eta";
    case Statistic::EtaTilde:
      return "eta-tilde";
    case Statistic::Entropy:
      return "entropy";
  }
  return "?";
}

CouplingRule parse_coupling(const std::string& name) {
  if (name == "zero") return CouplingRule::Zero;
  if (name == "equal") return CouplingRule::Equal;
  throw ConfigError("unknown coupling rule '" + name + "' (expected zero or equal)");
}

std::string to_string(CouplingRule c) { return c == CouplingRule::Zero ? "zero" : "equal"; }

std::vector<double> log_grid(double min, double max, int per_decade) {
  if (!(min > 0.0) || !(max >= min) || per_decade < 1) {
    throw ConfigError("eps grid needs 0 < min <= max and per_decade >= 1");
  }
  const double tol = 1e-9;
  const auto k0 = static_cast<long>(std::ceil(std::log10(min) * per_decade - tol));
  const auto k1 = static_cast<long>(std::floor(std::log10(max) * per_decade + tol));
  std::vector<double> out;
  for (long k = k0; k <= k1; ++k) out.push_back(std::pow(10.0, static_cast<double>(k) / per_decade));
  if (out.empty()) throw ConfigError("eps grid is empty");
  return out;
}

std::vector<double> parse_eps_grid(const std::string& spec) {
  double lo = 0.0;
  double hi = 0.0;
  int per = 0;
  char tail = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &lo, &hi, &per, &tail) != 3) {
    throw ConfigError("eps grid must be min:max:per-decade, got '" + spec + "'");
  }
  return log_grid(lo, hi, per);
}

void ExperimentConfig::validate() const {
  if (n_qubits.empty()) throw ConfigError("config: no qubit counts");
  for (int n : n_qubits) {
    if (n < 2 || n > kHardQubitCap) throw ConfigError("config: n_q must lie in [2, 12]");
  }
  if (eps.empty()) throw ConfigError("config: empty eps grid");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] >= 0.0) || !std::isfinite(eps[k])) throw ConfigError("config: eps values must be >= 0");
    if (k > 0 && !(eps[k] > eps[k - 1])) throw ConfigError("config: eps grid must be ascending");
  }
  if (realizations < 0) throw ConfigError("config: realizations must be >= 0");
  if (!(tau_g > 0.0)) throw ConfigError("config: tau_g must be positive");
  if (statistics.empty()) throw ConfigError("config: no statistic selected");
  if (!std::isfinite(K) || !std::isfinite(theta0) || !std::isfinite(phi)) throw ConfigError("config: non-finite map parameter");
}

bool ExperimentConfig::needs_eigenvectors() const {
  for (auto s : statistics) {
    if (s == Statistic::Entropy) return true;
  }
  return false;
}

int ExperimentConfig::realizations_for(int n) const {
  if (realizations > 0) return realizations;
  const double dim = std::ldexp(1.0, n);
  const auto rule = static_cast<int>(std::lround(1e4 / dim));
  return std::clamp(rule, 3, 1000);
}

void to_json(json& j, const ExperimentConfig& c) {
  std::vector<std::string> stats;
  for (auto s : c.statistics) stats.push_back(to_string(s));
  j = json{{"K", c.K},
           {"n_qubits", c.n_qubits},
           {"regime", c.regime},
           {"eps", c.eps},
           {"coupling", to_string(c.coupling)},
           {"tau_g", c.tau_g},
           {"theta0", c.theta0},
           {"phi", c.phi},
           {"realizations", c.realizations},
           {"seed", c.seed},
           {"statistics", stats},
           {"threshold", c.threshold},
           {"out_dir", c.out_dir},
           {"threads", c.threads},
           {"keep_levels", c.keep_levels},
           {"dump_spectra", c.dump_spectra}};
}

void from_json(const json& j, ExperimentConfig& c) {
  if (j.contains("regime")) {
    c = preset(j.at("regime").get<std::string>());
  }
  if (j.contains("K")) c.K = j.at("K").get<double>();
  if (j.contains("n_qubits")) {
    const auto& v = j.at("n_qubits");
    c.n_qubits = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
  }
  if (j.contains("eps")) {
    const auto& v = j.at("eps");
    c.eps = v.is_string() ? parse_eps_grid(v.get<std::string>()) : v.get<std::vector<double>>();
  }
  if (j.contains("coupling")) c.coupling = parse_coupling(j.at("coupling").get<std::string>());
  if (j.contains("tau_g")) c.tau_g = j.at("tau_g").get<double>();
  if (j.contains("theta0")) c.theta0 = j.at("theta0").get<double>();
  if (j.contains("phi")) c.phi = j.at("phi").get<double>();
  if (j.contains("realizations")) c.realizations = j.at("realizations").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("statistics") || j.contains("statistic")) {
    const auto& v = j.contains("statistics") ? j.at("statistics") : j.at("statistic");
    c.statistics.clear();
    if (v.is_array()) {
      for (const auto& s : v) c.statistics.push_back(parse_statistic(s.get<std::string>()));
    } else {
      c.statistics.push_back(parse_statistic(v.get<std::string>()));
    }
  }
  if (j.contains("threshold")) c.threshold = j.at("threshold").get<double>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("keep_levels")) c.keep_levels = j.at("keep_levels").get<bool>();
  if (j.contains("dump_spectra")) c.dump_spectra = j.at("dump_spectra").get<bool>();
}

std::string config_hash(const ExperimentConfig& c) {
  json j = c;
  j.erase("out_dir");
  j.erase("threads");
  j.erase("dump_spectra");
  j.erase("regime");
  const std::string canon = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig preset(const std::string& regime) {
  ExperimentConfig c;
  c.regime = regime;
  if (regime == "ergodic") {
    c.K = std::sqrt(2.0);
    c.statistics = {Statistic::Eta};
  } else if (regime == "quasi-integrable") {
    c.K = -0.1;
    c.theta0 = c.phi = std::sqrt(2.0) / 5.0;
    c.statistics = {Statistic::EtaTilde};
  } else if (regime == "integrable") {
    c.K = -1.0;
    c.statistics = {Statistic::EtaTilde};
  } else if (regime != "custom") {
    throw ConfigError("unknown regime '" + regime + "'");
  }
  return c;
}

}  // namespace qchaos
