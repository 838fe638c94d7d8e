#include "qchaos/sweep.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <tuple>

#include "qchaos/eigenstates.hpp"
#include "qchaos/imperfections.hpp"
#include "qchaos/rng.hpp"
#include "qchaos/sawtooth.hpp"

namespace qchaos {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct StopSweep {};

double jackknife_stderr(const std::vector<double>& leave_one_out) {
  const double n = static_cast<double>(leave_one_out.size());
  if (n < 2) return 0.0;
  const double mean = std::accumulate(leave_one_out.begin(), leave_one_out.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : leave_one_out) ss += (v - mean) * (v - mean);
  return std::sqrt((n - 1.0) / n * ss);
}

double histogram_statistic(Statistic s, const SpacingHistogram& h) {
  return s == Statistic::Eta ? eta(h, 1) : eta_tilde(h, 1);
}

// Lazily evaluates sweep points, sharing realizations with a checkpoint file.
class SweepEngine {
 public:
  SweepEngine(const ExperimentConfig& cfg, const SweepOptions& opts)
      : cfg_(cfg), opts_(opts), hash_(config_hash(cfg)) {
    cfg_.validate();
    if (opts_.checkpoint) load_checkpoint();
  }

  const std::string& hash() const { return hash_; }

  const PointResult& point(int n_qubits, std::size_t eps_index) {
    const auto key = std::make_pair(n_qubits, eps_index);
    if (auto it = points_.find(key); it != points_.end()) return it->second;
    return points_.emplace(key, compute_point(n_qubits, eps_index)).first->second;
  }

  std::vector<PointResult> all_points() const {
    std::vector<PointResult> out;
    for (const auto& [key, pt] : points_) out.push_back(pt);
    return out;
  }

 private:
  using TaskKey = std::tuple<int, std::size_t, std::uint64_t>;

  fs::path checkpoint_path() const { return fs::path(cfg_.out_dir) / ("checkpoint-" + hash_ + ".jsonl"); }

  void load_checkpoint() {
    std::ifstream in(checkpoint_path());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error&) {
        continue;  // torn final line from an interrupted write
      }
      RealizationResult r;
      r.index = j.at("r").get<std::uint64_t>();
      const auto counts = j.at("counts").get<std::vector<std::uint64_t>>();
      std::copy(counts.begin(), counts.end(), r.histogram.counts.begin());
      r.histogram.below_crossover = j.at("below").get<std::uint64_t>();
      r.histogram.total = j.at("total").get<std::uint64_t>();
      r.entropy = j.at("entropy").get<double>();
      r.checksum = j.at("checksum").get<std::uint64_t>();
      if (j.contains("levels")) r.levels = j.at("levels").get<std::vector<double>>();
      done_[{j.at("n_q").get<int>(), j.at("eps_index").get<std::size_t>(), r.index}] = std::move(r);
    }
  }

  void append_checkpoint(int n_qubits, std::size_t eps_index, const RealizationResult& r) {
    json j{{"n_q", n_qubits},
           {"eps_index", eps_index},
           {"r", r.index},
           {"counts", r.histogram.counts},
           {"below", r.histogram.below_crossover},
           {"total", r.histogram.total},
           {"entropy", r.entropy},
           {"checksum", r.checksum}};
    if (!r.levels.empty()) j["levels"] = r.levels;
    fs::create_directories(cfg_.out_dir);
    std::ofstream out(checkpoint_path(), std::ios::app);
    out << j.dump() << '\n';
  }

  const CMatrix& ideal_vectors(int n_qubits) {
    auto it = ideal_vectors_.find(n_qubits);
    if (it != ideal_vectors_.end()) return it->second;
    const auto params = make_params(cfg_.K, n_qubits, cfg_.theta0, cfg_.phi);
    const CMatrix u = build_floquet(compile_iteration(params), nullptr);
    return ideal_vectors_.emplace(n_qubits, diagonalize(u, true).eigenvectors).first->second;
  }

  RealizationResult compute_realization(int n_qubits, double eps, std::uint64_t r, const CMatrix* v0) const {
    const CMatrix u = perturbed_floquet(cfg_, n_qubits, eps, r);
    const bool vectors = v0 != nullptr;
    const auto spectrum = diagonalize(u, vectors);
    RealizationResult out;
    out.index = r;
    out.histogram.add(spacings(spectrum.quasi_energies));
    out.checksum = checksum_levels(spectrum.quasi_energies);
    if (vectors) out.entropy = entropy(overlaps(*v0, spectrum.eigenvectors)).mean;
    if (cfg_.keep_levels && r == 0) out.levels = spectrum.quasi_energies;
    return out;
  }

  PointResult compute_point(int n_qubits, std::size_t eps_index) {
    const double eps = cfg_.eps.at(eps_index);
    // Without imperfections every realization is the ideal operator.
    const int n_real = eps == 0.0 ? 1 : cfg_.realizations_for(n_qubits);
    const CMatrix* v0 = cfg_.needs_eigenvectors() ? &ideal_vectors(n_qubits) : nullptr;

    std::vector<RealizationResult> results(static_cast<std::size_t>(n_real));
    std::vector<int> todo;
    for (int r = 0; r < n_real; ++r) {
      auto it = done_.find({n_qubits, eps_index, static_cast<std::uint64_t>(r)});
      if (it != done_.end()) {
        results[static_cast<std::size_t>(r)] = it->second;
      } else {
        todo.push_back(r);
      }
    }
    bool stopped = false;
    if (todo.size() > opts_.task_budget - tasks_run_) {
      todo.resize(opts_.task_budget - tasks_run_);
      stopped = true;
    }

    std::mutex io;
    const int n_todo = static_cast<int>(todo.size());
    const int workers = std::min(omp_get_max_threads(), max_concurrent_tasks(n_qubits, opts_.memory_budget_bytes));
    const bool parallel_tasks = n_todo > 1 && workers > 1;
    if (parallel_tasks) set_blas_threads(1);
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (parallel_tasks)
    for (int t = 0; t < n_todo; ++t) {
      const auto r = static_cast<std::uint64_t>(todo[static_cast<std::size_t>(t)]);
      auto res = compute_realization(n_qubits, eps, r, v0);
      if (opts_.checkpoint) {
        std::lock_guard lock(io);
        append_checkpoint(n_qubits, eps_index, res);
      }
      results[r] = std::move(res);
    }
    tasks_run_ += todo.size();
    if (stopped) throw StopSweep{};

    PointResult pt;
    pt.n_qubits = n_qubits;
    pt.eps_index = eps_index;
    pt.eps = eps;
    pt.realizations = n_real;
    std::uint64_t chk = 0xcbf29ce484222325ULL;
    double entropy_sum = 0.0;
    for (const auto& res : results) {
      pt.pooled.merge(res.histogram);
      chk = mix64(chk ^ res.checksum);
      entropy_sum += res.entropy;
    }
    pt.checksum = chk;
    pt.levels = results.front().levels;

    for (auto stat : cfg_.statistics) {
      if (stat == Statistic::Entropy) {
        pt.value[stat] = entropy_sum / n_real;
      } else {
        pt.value[stat] = histogram_statistic(stat, pt.pooled);
      }
      std::vector<double> loo;
      if (n_real >= 2) {
        for (std::size_t k = 0; k < results.size(); ++k) {
          if (stat == Statistic::Entropy) {
            loo.push_back((entropy_sum - results[k].entropy) / (n_real - 1));
          } else {
            SpacingHistogram h;
            for (std::size_t m = 0; m < results.size(); ++m) {
              if (m != k) h.merge(results[m].histogram);
            }
            loo.push_back(histogram_statistic(stat, h));
          }
        }
        pt.stderr_of[stat] = jackknife_stderr(loo);
      } else if (stat == Statistic::Eta) {
        const double s0 = crossover_point();
        const double f = static_cast<double>(pt.pooled.below_crossover) / static_cast<double>(pt.pooled.total);
        pt.stderr_of[stat] = std::sqrt(f * (1.0 - f) / static_cast<double>(pt.pooled.total)) /
                             (surmise_cdf(Surmise::GOE2, s0) - surmise_cdf(Surmise::GUE, s0));
      } else {
        pt.stderr_of[stat] = 0.0;
      }
    }
    return pt;
  }

  ExperimentConfig cfg_;
  SweepOptions opts_;
  std::string hash_;
  std::map<std::pair<int, std::size_t>, PointResult> points_;
  std::map<TaskKey, RealizationResult> done_;
  std::map<int, CMatrix> ideal_vectors_;
  std::size_t tasks_run_ = 0;
};

void apply_threads(const ExperimentConfig& cfg) {
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
}

double nominal_constant(ScalingModel model) {
  switch (model) {
    case ScalingModel::Ergodic:
      return 4.3;
    case ScalingModel::Integrable:
      return 1.4;
    case ScalingModel::FreeExponent:
      return 4.3;
  }
  return 1.0;
}

std::size_t nearest_index(const std::vector<double>& eps, double target) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) continue;
    const double d = std::fabs(std::log(eps[k]) - std::log(target));
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

}  // namespace

const PointResult* RunRecord::find(int n_qubits, std::size_t eps_index) const {
  for (const auto& p : points) {
    if (p.n_qubits == n_qubits && p.eps_index == eps_index) return &p;
  }
  return nullptr;
}

CrossoverCurve RunRecord::curve(Statistic s, int n_qubits) const {
  CrossoverCurve c;
  for (const auto& p : points) {
    if (p.n_qubits != n_qubits || !(p.eps > 0.0)) continue;
    auto it = p.value.find(s);
    if (it == p.value.end()) continue;
    c.eps.push_back(p.eps);
    c.value.push_back(it->second);
    c.realizations.push_back(p.realizations);
  }
  return c;
}

const BorderTable* RunRecord::border(Statistic s) const {
  for (const auto& b : borders) {
    if (b.statistic == s) return &b;
  }
  return nullptr;
}

int max_concurrent_tasks(int n_qubits, std::size_t memory_budget_bytes) {
  const double per_task = 6.0 * std::ldexp(1.0, 2 * n_qubits) * sizeof(cplx);
  return std::max(1, static_cast<int>(static_cast<double>(memory_budget_bytes) / per_task));
}

std::uint64_t disorder_stream(const ExperimentConfig& cfg, int n_qubits) {
  return derive_seed(cfg.seed, {static_cast<std::uint64_t>(n_qubits)});
}

CMatrix perturbed_floquet(const ExperimentConfig& cfg, int n_qubits, double eps, std::uint64_t realization) {
  const auto params = make_params(cfg.K, n_qubits, cfg.theta0, cfg.phi);
  const auto seq = compile_iteration(params);
  if (eps == 0.0) return build_floquet(seq, nullptr);
  ImperfectionParams ip;
  ip.tau_g = cfg.tau_g;
  ip.delta = eps / cfg.tau_g;
  ip.coupling = cfg.coupling == CouplingRule::Equal ? ip.delta : 0.0;
  const auto disorder = sample_disorder(n_qubits, ip, disorder_stream(cfg, n_qubits), realization);
  const auto e = make_propagator(disorder, cfg.tau_g);
  return build_floquet(seq, &e);
}

std::uint64_t checksum_levels(const std::vector<double>& levels) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : levels) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

double border_level(Statistic s, const ExperimentConfig& cfg) {
  return s == Statistic::Entropy ? 1.0 : cfg.threshold;
}

Crossing border_direction(Statistic s) {
  return s == Statistic::Entropy ? Crossing::Upward : Crossing::Downward;
}

RunRecord run_sweep(const ExperimentConfig& cfg, const SweepOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  apply_threads(cfg);
  SweepEngine engine(cfg, opts);
  RunRecord rec;
  rec.config = cfg;
  rec.config_hash = engine.hash();
  try {
    for (int n : cfg.n_qubits) {
      for (std::size_t k = 0; k < cfg.eps.size(); ++k) engine.point(n, k);
    }
  } catch (const StopSweep&) {
    rec.complete = false;
  }
  rec.points = engine.all_points();
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

RunRecord run_border_study(const ExperimentConfig& cfg, const BorderOptions& border, const SweepOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  apply_threads(cfg);
  SweepEngine engine(cfg, opts);
  RunRecord rec;
  rec.config = cfg;
  rec.config_hash = engine.hash();

  std::vector<std::size_t> positive;
  for (std::size_t k = 0; k < cfg.eps.size(); ++k) {
    if (cfg.eps[k] > 0.0) positive.push_back(k);
  }
  if (positive.size() < 2) throw ConfigError("border study needs at least two positive eps values");

  std::vector<int> nqs = cfg.n_qubits;
  std::sort(nqs.begin(), nqs.end());

  try {
    for (auto stat : cfg.statistics) {
      BorderTable table;
      table.statistic = stat;
      table.level = border_level(stat, cfg);
      const Crossing dir = border_direction(stat);
      auto above = [&](double v) { return dir == Crossing::Downward ? v >= table.level : v < table.level; };

      std::optional<BorderRow> previous;
      for (int n : nqs) {
        std::vector<std::size_t> visited;
        auto value_at = [&](std::size_t pos) {
          if (std::find(visited.begin(), visited.end(), pos) == visited.end()) visited.push_back(pos);
          return engine.point(n, positive[pos]).value.at(stat);
        };
        if (border.bracket) {
          std::size_t start = positive.size() / 2;
          if (previous) {
            ScalingFit law{border.model, 1.0, border.model == ScalingModel::Integrable ? 0.0 : -0.5, {}, 0.0};
            const double guess = previous->eps_chi * law.predict(n) / law.predict(previous->n_qubits);
            start = nearest_index(cfg.eps, guess);
          } else if (border.guess_constant > 0.0 || border.model != ScalingModel::FreeExponent) {
            const double c = border.guess_constant > 0.0 ? border.guess_constant : nominal_constant(border.model);
            ScalingFit law{border.model, c, -0.5, {}, 0.0};
            start = nearest_index(cfg.eps, law.predict(n));
          }
          start = static_cast<std::size_t>(std::find(positive.begin(), positive.end(), start) - positive.begin());
          if (start >= positive.size()) start = positive.size() / 2;
          std::size_t j = start;
          if (above(value_at(j))) {
            while (j + 1 < positive.size() && above(value_at(j + 1))) ++j;
          } else {
            while (j > 0 && !above(value_at(j - 1))) --j;
          }
        } else {
          for (std::size_t pos = 0; pos < positive.size(); ++pos) value_at(pos);
        }

        // Crossing on the contiguous run of grid points this walk visited.
        std::sort(visited.begin(), visited.end());
        CrossoverCurve curve;
        std::vector<double> errors;
        for (auto pos : visited) {
          const auto& pt = engine.point(n, positive[pos]);
          curve.eps.push_back(pt.eps);
          curve.value.push_back(pt.value.at(stat));
          curve.realizations.push_back(pt.realizations);
          errors.push_back(pt.stderr_of.at(stat));
        }
        BorderRow row;
        row.n_qubits = n;
        row.eps_chi = threshold_crossing(curve, table.level, dir);
        for (std::size_t k = 0; k + 1 < curve.eps.size(); ++k) {
          if (curve.eps[k] <= row.eps_chi && row.eps_chi <= curve.eps[k + 1]) {
            const double se = 0.5 * (errors[k] + errors[k + 1]);
            const double slope = std::fabs(curve.value[k] - curve.value[k + 1]) /
                                 (std::log(curve.eps[k + 1]) - std::log(curve.eps[k]));
            row.stderr_of = slope > 0.0 ? row.eps_chi * se / slope : 0.0;
            break;
          }
        }
        table.rows.push_back(row);
        previous = row;
      }

      if (table.rows.size() >= 3) {
        std::vector<ScalingPoint> pts;
        for (const auto& r : table.rows) pts.push_back({r.n_qubits, r.eps_chi});
        table.fit = fit_scaling(pts, border.model);
        table.free_fit = fit_scaling(pts, ScalingModel::FreeExponent);
        for (auto& r : table.rows) r.model_value = table.fit->predict(r.n_qubits);
      }
      rec.borders.push_back(std::move(table));
    }
  } catch (const StopSweep&) {
    rec.complete = false;
  }
  rec.points = engine.all_points();
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace qchaos
