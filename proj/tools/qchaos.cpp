// qchaos command line: spectra, sweeps, chaos borders, Husimi densities,
// classical checks and runtime calibration for the quantum sawtooth map.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <omp.h>

#include "qchaos/classical.hpp"
#include "qchaos/config.hpp"
#include "qchaos/eigenstates.hpp"
#include "qchaos/floquet.hpp"
#include "qchaos/output.hpp"
#include "qchaos/rng.hpp"
#include "qchaos/spectral.hpp"
#include "qchaos/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qchaos;

namespace {

struct CommonFlags {
  std::string config_file;
  std::string regime;
  double K = 0.0;
  std::vector<int> nq;
  std::string nq_range;
  std::string eps_grid;
  std::string coupling;
  double theta0 = 0.0;
  double phi = 0.0;
  int realizations = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> stats;
  double threshold = 0.0;
  std::string out;
  int threads = 0;
  bool keep_levels = false;
  bool dump_spectra = false;

  std::vector<CLI::Option*> opts;
};

CLI::Option* find(const std::vector<CLI::Option*>& opts, const std::string& name) {
  for (auto* o : opts) {
    if (o->check_name(name)) return o;
  }
  return nullptr;
}

bool given(const CommonFlags& f, const std::string& name) {
  auto* o = find(f.opts, name);
  return o != nullptr && o->count() > 0;
}

void add_common(CLI::App* app, CommonFlags& f) {
  f.opts.push_back(app->add_option("--config", f.config_file, "JSON config file (flags override it)"));
  f.opts.push_back(app->add_option("--regime", f.regime, "preset: ergodic, quasi-integrable, integrable, custom"));
  f.opts.push_back(app->add_option("--K", f.K, "classical chaos parameter"));
  f.opts.push_back(app->add_option("--nq", f.nq, "qubit count(s)")->delimiter(','));
  f.opts.push_back(app->add_option("--nq-range", f.nq_range, "qubit range lo:hi (inclusive)"));
  f.opts.push_back(app->add_option("--eps-grid", f.eps_grid, "log grid min:max:per-decade"));
  f.opts.push_back(app->add_option("--coupling", f.coupling, "coupling rule: zero or equal"));
  f.opts.push_back(app->add_option("--theta0", f.theta0, "angle shift"));
  f.opts.push_back(app->add_option("--phi", f.phi, "momentum shift"));
  f.opts.push_back(app->add_option("--realizations", f.realizations, "disorder realizations (0: budget rule)"));
  f.opts.push_back(app->add_option("--seed", f.seed, "master seed"));
  f.opts.push_back(app->add_option("--stat", f.stats, "statistic: eta, eta-tilde, entropy")->delimiter(','));
  f.opts.push_back(app->add_option("--threshold", f.threshold, "border threshold for eta / eta-tilde"));
  f.opts.push_back(app->add_option("--out", f.out, "output directory"));
  f.opts.push_back(app->add_option("--threads", f.threads, "OpenMP threads (0: default)"));
  f.opts.push_back(app->add_flag("--keep-levels", f.keep_levels, "keep realization-0 quasi-energies per point"));
  f.opts.push_back(app->add_flag("--dump-spectra", f.dump_spectra, "write kept spectra as binary float64"));
}

std::vector<int> parse_range(const std::string& spec) {
  int lo = 0;
  int hi = 0;
  char tail = 0;
  if (std::sscanf(spec.c_str(), "%d:%d%c", &lo, &hi, &tail) != 2 || hi < lo) {
    throw ConfigError("--nq-range must be lo:hi with lo <= hi, got '" + spec + "'");
  }
  std::vector<int> out;
  for (int n = lo; n <= hi; ++n) out.push_back(n);
  return out;
}

ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig c;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw ConfigError("cannot read config '" + f.config_file + "'");
    c = json::parse(in).get<ExperimentConfig>();
  }
  if (given(f, "--regime")) {
    const auto out_dir = c.out_dir;
    c = preset(f.regime);
    c.out_dir = out_dir;
  }
  if (given(f, "--K")) c.K = f.K;
  if (given(f, "--nq")) c.n_qubits = f.nq;
  if (given(f, "--nq-range")) c.n_qubits = parse_range(f.nq_range);
  if (given(f, "--eps-grid")) c.eps = parse_eps_grid(f.eps_grid);
  if (given(f, "--coupling")) c.coupling = parse_coupling(f.coupling);
  if (given(f, "--theta0")) c.theta0 = f.theta0;
  if (given(f, "--phi")) c.phi = f.phi;
  if (given(f, "--realizations")) c.realizations = f.realizations;
  if (given(f, "--seed")) c.seed = f.seed;
  if (given(f, "--stat")) {
    c.statistics.clear();
    for (const auto& s : f.stats) c.statistics.push_back(parse_statistic(s));
  }
  if (given(f, "--threshold")) c.threshold = f.threshold;
  if (given(f, "--out")) c.out_dir = f.out;
  if (given(f, "--threads")) c.threads = f.threads;
  if (given(f, "--keep-levels")) c.keep_levels = f.keep_levels;
  if (given(f, "--dump-spectra")) c.dump_spectra = f.dump_spectra;
  c.validate();
  if (c.threads > 0) omp_set_num_threads(c.threads);
  return c;
}

void finish(const RunRecord& rec, std::vector<std::string> files) {
  const fs::path dir = rec.config.out_dir;
  if (rec.config.dump_spectra) {
    auto bin = write_spectra_binary(rec, dir);
    files.insert(files.end(), bin.files.begin(), bin.files.end());
  }
  write_manifest(rec, files, dir);
  std::cerr << "wrote " << files.size() + 1 << " files to " << dir.string() << " (config " << rec.config_hash
            << (rec.complete ? "" : ", incomplete") << ")\n";
}

// Single eps value: the first point of the grid unless --eps is given.
int cmd_spectrum(const CommonFlags& f, double eps, std::uint64_t realization, bool parity) {
  auto cfg = resolve(f);
  const int n = cfg.n_qubits.front();
  const auto params = make_params(cfg.K, n, cfg.theta0, cfg.phi);
  const CMatrix u = perturbed_floquet(cfg, n, eps, realization);
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  std::vector<std::string> files;

  std::vector<std::pair<std::string, std::vector<double>>> sets;
  if (parity) {
    auto [even, odd] = parity_blocks(params, u);
    sets.emplace_back("even", diagonalize(even, false).quasi_energies);
    sets.emplace_back("odd", diagonalize(odd, false).quasi_energies);
  } else {
    sets.emplace_back("all", diagonalize(u, false).quasi_energies);
  }

  std::ofstream lev(dir / "spectrum.csv");
  lev.precision(17);
  lev << "sector,index,lambda\n";
  SpacingHistogram h;
  for (const auto& [name, levels] : sets) {
    for (std::size_t k = 0; k < levels.size(); ++k) lev << name << ',' << k << ',' << levels[k] << '\n';
    h.add(spacings(levels));
  }
  files.push_back("spectrum.csv");

  RunRecord rec;
  rec.config = cfg;
  rec.config.eps = {eps};
  rec.config_hash = config_hash(rec.config);
  PointResult pt;
  pt.n_qubits = n;
  pt.eps = eps;
  pt.realizations = 1;
  pt.pooled = h;
  if (cfg.keep_levels || cfg.dump_spectra) pt.levels = sets.front().second;
  std::cout.precision(6);
  std::cout << "n_q=" << n << " K=" << cfg.K << " eps=" << eps << " spacings=" << h.total;
  if (h.total >= kMinSpacingCount) {
    pt.value[Statistic::Eta] = eta(h);
    pt.value[Statistic::EtaTilde] = eta_tilde(h);
    pt.stderr_of[Statistic::Eta] = 0.0;
    pt.stderr_of[Statistic::EtaTilde] = 0.0;
    std::cout << " eta=" << pt.value[Statistic::Eta] << " eta_tilde=" << pt.value[Statistic::EtaTilde];
  }
  std::cout << '\n';
  rec.points.push_back(pt);
  auto hist = emit_outputs(rec, {Artifact::SpacingHist}, dir);
  files.insert(files.end(), hist.files.begin(), hist.files.end());
  finish(rec, files);
  return 0;
}

int cmd_sweep(const CommonFlags& f, bool resume, std::size_t budget, bool histograms) {
  auto cfg = resolve(f);
  SweepOptions opts;
  opts.checkpoint = resume;
  if (budget > 0) opts.task_budget = budget;
  const auto rec = run_sweep(cfg, opts);
  std::vector<Artifact> arts{Artifact::EtaCurve};
  if (histograms) arts.push_back(Artifact::SpacingHist);
  if (cfg.keep_levels) arts.push_back(Artifact::LevelsVsEps);
  auto out = emit_outputs(rec, arts, cfg.out_dir);
  for (const auto& pt : rec.points) {
    std::cout << "n_q=" << pt.n_qubits << " eps=" << pt.eps;
    for (const auto& [s, v] : pt.value) std::cout << ' ' << to_string(s) << '=' << v << "+-" << pt.stderr_of.at(s);
    std::cout << '\n';
  }
  finish(rec, out.files);
  return rec.complete ? 0 : 3;
}

int cmd_border(const CommonFlags& f, const std::string& model, bool full_grid, double guess, bool resume) {
  auto cfg = resolve(f);
  BorderOptions b;
  b.model = parse_scaling_model(model);
  b.bracket = !full_grid;
  b.guess_constant = guess;
  SweepOptions opts;
  opts.checkpoint = resume;
  const auto rec = run_border_study(cfg, b, opts);
  auto out = emit_outputs(rec, {Artifact::EtaCurve, Artifact::BorderTable}, cfg.out_dir);
  for (const auto& t : rec.borders) {
    std::cout << to_string(t.statistic) << " level " << t.level << '\n';
    for (const auto& r : t.rows) std::cout << "  n_q=" << r.n_qubits << " eps_chi=" << r.eps_chi << " +- " << r.stderr_of << '\n';
    if (t.fit) std::cout << "  fit " << to_string(t.fit->model) << " C=" << t.fit->constant << " rms=" << t.fit->rms << '\n';
    if (t.free_fit) std::cout << "  free exponent b=" << t.free_fit->slope << " C=" << t.free_fit->constant << '\n';
  }
  finish(rec, out.files);
  return rec.complete ? 0 : 3;
}

int cmd_husimi(const CommonFlags& f, double eps, std::uint64_t realization, int state_index, int points) {
  auto cfg = resolve(f);
  const int n = cfg.n_qubits.front();
  const auto params = make_params(cfg.K, n, cfg.theta0, cfg.phi);
  const auto spec = diagonalize(perturbed_floquet(cfg, n, eps, realization), true);
  if (state_index < 0 || state_index >= spec.eigenvectors.cols()) throw ConfigError("--state out of range");
  std::vector<cplx> amp(spec.eigenvectors.rows());
  for (Eigen::Index m = 0; m < spec.eigenvectors.rows(); ++m) amp[static_cast<std::size_t>(m)] = spec.eigenvectors(m, state_index);
  const int pts = points > 0 ? points : default_husimi_points(params.dim);
  const auto grid = husimi(StateVector(n, std::move(amp)), params, pts, pts);
  const fs::path dir = cfg.out_dir;
  const auto name = write_husimi(grid, dir / "husimi.csv");
  RunRecord rec;
  rec.config = cfg;
  rec.config.eps = {eps};
  rec.config_hash = config_hash(rec.config);
  std::cout << "state " << state_index << " lambda=" << spec.quasi_energies[static_cast<std::size_t>(state_index)]
            << " grid " << pts << "x" << pts << '\n';
  finish(rec, {name});
  return 0;
}

int cmd_classical(const CommonFlags& f, int samples, int steps, double threshold, std::uint64_t seed) {
  const double K = given(f, "--K") ? f.K : -0.1;
  const double thr = threshold > 0.0 ? threshold : default_diffusion_threshold(K);
  const double frac = diffusive_fraction(K, samples, steps, thr, seed);
  std::cout << "K=" << K << " threshold=" << thr << " samples=" << samples << " steps=" << steps
            << " diffusive_fraction=" << frac << '\n';
  if (given(f, "--out")) {
    fs::create_directories(f.out);
    std::ofstream out(fs::path(f.out) / "classical.csv");
    out.precision(17);
    out << "K,threshold,samples,steps,diffusive_fraction\n" << K << ',' << thr << ',' << samples << ',' << steps << ',' << frac << '\n';
  }
  return 0;
}

// Synthetic-ensemble self-test of the crossover measures: eta and
// eta-tilde on inverse-CDF GUE draws and on superposed GOE sequences.
int cmd_calibrate(const CommonFlags& f, std::size_t draws) {
  const auto cfg = resolve(f);
  CounterRng gue_rng(derive_seed(cfg.seed, {1}));
  CounterRng goe_rng(derive_seed(cfg.seed, {2}));
  SpacingSample gue;
  gue.s.reserve(draws);
  for (std::size_t k = 0; k < draws; ++k) gue.s.push_back(sample_surmise(Surmise::GUE, gue_rng));
  SpacingSample goe2;
  goe2.s = sample_superposed_goe(draws, goe_rng);

  const double eta_gue = eta(gue);
  const double eta_goe2 = eta(goe2);
  const double tilde_gue = eta_tilde(gue);
  const double tilde_goe2 = eta_tilde(goe2);
  const bool ok = std::fabs(eta_gue) <= 0.02 && std::fabs(eta_goe2 - 1.0) <= 0.02 && tilde_gue <= 0.03;

  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  std::ofstream out(dir / "calibrate.csv");
  out.precision(17);
  out << "ensemble,draws,eta,eta_tilde\n"
      << "GUE," << gue.count() << ',' << eta_gue << ',' << tilde_gue << '\n'
      << "GOE2," << goe2.count() << ',' << eta_goe2 << ',' << tilde_goe2 << '\n';
  std::cout << "GUE  draws=" << gue.count() << " eta=" << eta_gue << " eta_tilde=" << tilde_gue << '\n'
            << "GOE2 draws=" << goe2.count() << " eta=" << eta_goe2 << " eta_tilde=" << tilde_goe2 << '\n'
            << (ok ? "calibration ok" : "calibration FAILED") << '\n';
  RunRecord rec;
  rec.config = cfg;
  rec.config_hash = config_hash(cfg);
  finish(rec, {"calibrate.csv"});
  return ok ? 0 : 4;
}

// Times one perturbed build plus diagonalization per qubit count and
// projects the cost of the configured sweep.
int cmd_timing(const CommonFlags& f) {
  auto cfg = resolve(f);
  const double eps = cfg.eps.back();
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  std::ofstream out(dir / "timing.csv");
  out << "n_q,build_seconds,diag_seconds,realizations,projected_seconds\n";
  double total = 0.0;
  for (int n : cfg.n_qubits) {
    const auto t0 = std::chrono::steady_clock::now();
    const CMatrix u = perturbed_floquet(cfg, n, eps, 0);
    const auto t1 = std::chrono::steady_clock::now();
    diagonalize(u, cfg.needs_eigenvectors());
    const auto t2 = std::chrono::steady_clock::now();
    const double build = std::chrono::duration<double>(t1 - t0).count();
    const double diag = std::chrono::duration<double>(t2 - t1).count();
    const int nr = cfg.realizations_for(n);
    const double projected = (build + diag) * nr * static_cast<double>(cfg.eps.size());
    total += projected;
    out << n << ',' << build << ',' << diag << ',' << nr << ',' << projected << '\n';
    std::cout << "n_q=" << n << " build=" << build << "s diag=" << diag << "s x " << nr << " realizations x "
              << cfg.eps.size() << " eps -> " << projected << "s\n";
  }
  std::cout << "projected full sweep: " << total << "s on " << omp_get_max_threads() << " thread(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum sawtooth map under static hardware imperfections"};
  app.require_subcommand(1);

  CommonFlags spectrum_f, sweep_f, border_f, husimi_f, classical_f, calibrate_f;

  auto* spectrum = app.add_subcommand("spectrum", "quasi-energies and spacing statistics of one operator");
  add_common(spectrum, spectrum_f);
  double spec_eps = 0.0;
  std::uint64_t spec_real = 0;
  bool spec_parity = false;
  spectrum->add_option("--eps", spec_eps, "imperfection strength (default 0)");
  spectrum->add_option("--realization", spec_real, "disorder realization index");
  spectrum->add_flag("--parity", spec_parity, "split into reflection-parity blocks");

  auto* sweep = app.add_subcommand("sweep", "statistic versus eps over the grid");
  add_common(sweep, sweep_f);
  bool resume = false;
  std::size_t budget = 0;
  bool histograms = false;
  sweep->add_flag("--resume", resume, "read / append the per-realization checkpoint");
  sweep->add_option("--budget", budget, "stop after this many new realizations");
  sweep->add_flag("--histograms", histograms, "write a spacing histogram per point");

  auto* border = app.add_subcommand("border", "chaos border per n_q and scaling fit");
  add_common(border, border_f);
  std::string model = "ergodic";
  bool full_grid = false;
  double guess = 0.0;
  bool border_resume = false;
  border->add_option("--model", model, "scaling model: ergodic, integrable, free");
  border->add_flag("--full-grid", full_grid, "evaluate every grid point instead of bracketing");
  border->add_option("--guess", guess, "model constant used for the first bracket guess");
  border->add_flag("--resume", border_resume, "read / append the per-realization checkpoint");

  auto* hus = app.add_subcommand("husimi", "Husimi density of one Floquet eigenstate");
  add_common(hus, husimi_f);
  double hus_eps = 0.0;
  std::uint64_t hus_real = 0;
  int hus_state = 0;
  int hus_points = 0;
  hus->add_option("--eps", hus_eps, "imperfection strength");
  hus->add_option("--realization", hus_real, "disorder realization index");
  hus->add_option("--state", hus_state, "eigenstate index in quasi-energy order");
  hus->add_option("--points", hus_points, "grid points per axis (0: 4 sqrt(N), max 256)");

  auto* classical = app.add_subcommand("classical", "diffusive fraction of the classical map");
  add_common(classical, classical_f);
  int samples = 100000;
  int steps = 1000;
  double cl_threshold = 0.0;
  std::uint64_t cl_seed = 1;
  classical->add_option("--samples", samples, "initial conditions");
  classical->add_option("--steps", steps, "iterations per orbit");
  classical->add_option("--excursion", cl_threshold, "momentum excursion threshold (0: default)");
  classical->add_option("--classical-seed", cl_seed, "sampling seed");

  auto* calibrate = app.add_subcommand("calibrate", "synthetic-ensemble eta / eta-tilde self-test");
  add_common(calibrate, calibrate_f);
  std::size_t draws = 100000;
  bool timing = false;
  calibrate->add_option("--draws", draws, "synthetic spacings per ensemble");
  calibrate->add_flag("--timing", timing, "instead time one realization per n_q and project the sweep cost");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*spectrum) return cmd_spectrum(spectrum_f, spec_eps, spec_real, spec_parity);
    if (*sweep) return cmd_sweep(sweep_f, resume, budget, histograms);
    if (*border) return cmd_border(border_f, model, full_grid, guess, border_resume);
    if (*hus) return cmd_husimi(husimi_f, hus_eps, hus_real, hus_state, hus_points);
    if (*classical) return cmd_classical(classical_f, samples, steps, cl_threshold, cl_seed);
    if (*calibrate) return timing ? cmd_timing(calibrate_f) : cmd_calibrate(calibrate_f, draws);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
