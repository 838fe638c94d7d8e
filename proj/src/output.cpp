#include "qchaos/output.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <map>

#include "qchaos/rng.hpp"

namespace qchaos {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot open '" + file.string() + "' for writing");
  out.precision(17);
  return out;
}

std::string eps_tag(std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", k);
  return buf;
}

// Bin average of a surmise density over [lo, hi].
double bin_average(Surmise kind, double lo, double hi) {
  return (surmise_cdf(kind, hi) - surmise_cdf(kind, lo)) / (hi - lo);
}

json fit_json(const ScalingFit& f) {
  return json{{"model", to_string(f.model)}, {"constant", f.constant}, {"slope", f.slope}, {"rms", f.rms}};
}

}  // namespace

Artifact parse_artifact(const std::string& name) {
  if (name == "spacing-hist") return Artifact::SpacingHist;
  if (name == "eta-curve") return Artifact::EtaCurve;
  if (name == "border-table") return Artifact::BorderTable;
  if (name == "husimi-grid") return Artifact::HusimiGrid;
  if (name == "levels-vs-eps") return Artifact::LevelsVsEps;
  throw ConfigError("unknown artifact '" + name + "'");
}

std::string to_string(Artifact a) {
  switch (a) {
    case Artifact::SpacingHist:
      return "spacing-hist";
    case Artifact::EtaCurve:
      return "eta-curve";
    case Artifact::BorderTable:
      return "border-table";
    case Artifact::HusimiGrid:
      return "husimi-grid";
    case Artifact::LevelsVsEps:
      return "levels-vs-eps";
  }
  return "?";
}

EmittedFiles emit_outputs(const RunRecord& rec, const std::vector<Artifact>& artifacts, const fs::path& dir) {
  EmittedFiles out;
  for (auto a : artifacts) {
    switch (a) {
      case Artifact::SpacingHist: {
        for (const auto& pt : rec.points) {
          if (pt.pooled.total == 0) continue;
          const std::string name = "spacing-hist_nq" + std::to_string(pt.n_qubits) + "_eps" + eps_tag(pt.eps_index) + ".csv";
          auto f = open_out(dir / name);
          f << "s_bin_center,density_empirical,density_GOE2,density_GUE\n";
          for (int b = 0; b < SpacingHistogram::kBins; ++b) {
            const double lo = b * SpacingHistogram::kBinWidth;
            const double hi = lo + SpacingHistogram::kBinWidth;
            f << SpacingHistogram::bin_center(b) << ',' << pt.pooled.density(b) << ','
              << bin_average(Surmise::GOE2, lo, hi) << ',' << bin_average(Surmise::GUE, lo, hi) << '\n';
          }
          out.files.push_back(name);
        }
        break;
      }
      case Artifact::EtaCurve: {
        for (auto stat : rec.config.statistics) {
          const std::string name = "eta-curve_" + to_string(stat) + ".csv";
          auto f = open_out(dir / name);
          f << "n_q,eps,value,stderr,realizations\n";
          for (const auto& pt : rec.points) {
            auto it = pt.value.find(stat);
            if (it == pt.value.end()) continue;
            f << pt.n_qubits << ',' << pt.eps << ',' << it->second << ',' << pt.stderr_of.at(stat) << ','
              << pt.realizations << '\n';
          }
          out.files.push_back(name);
        }
        break;
      }
      case Artifact::BorderTable: {
        if (rec.borders.empty()) throw NotFoundError("run record has no border table (run the border subcommand)");
        for (const auto& table : rec.borders) {
          const std::string name = "border-table_" + to_string(table.statistic) + ".csv";
          auto f = open_out(dir / name);
          f << "n_q,eps_chi,stderr,model_value\n";
          for (const auto& r : table.rows) {
            f << r.n_qubits << ',' << r.eps_chi << ',' << r.stderr_of << ',' << r.model_value << '\n';
          }
          out.files.push_back(name);
        }
        break;
      }
      case Artifact::HusimiGrid:
        throw NotFoundError("husimi grids are not part of a run record (use the husimi subcommand)");
      case Artifact::LevelsVsEps: {
        std::map<int, std::vector<const PointResult*>> by_n;
        for (const auto& pt : rec.points) {
          if (!pt.levels.empty()) by_n[pt.n_qubits].push_back(&pt);
        }
        if (by_n.empty()) throw NotFoundError("run record kept no levels (enable keep_levels)");
        for (const auto& [n, pts] : by_n) {
          const std::string name = "levels-vs-eps_nq" + std::to_string(n) + ".csv";
          auto f = open_out(dir / name);
          f << "eps";
          for (std::size_t k = 1; k <= pts.front()->levels.size(); ++k) f << ",lambda_" << k;
          f << '\n';
          for (const auto* pt : pts) {
            f << pt->eps;
            for (double l : pt->levels) f << ',' << l;
            f << '\n';
          }
          out.files.push_back(name);
        }
        break;
      }
    }
  }
  return out;
}

std::string write_husimi(const HusimiGrid& grid, const fs::path& file) {
  auto f = open_out(file);
  f << "theta,p,density\n";
  for (int i = 0; i < grid.n_theta; ++i) {
    for (int j = 0; j < grid.n_p; ++j) f << grid.theta(i) << ',' << grid.p(j) << ',' << grid.at(i, j) << '\n';
  }
  return file.filename().string();
}

EmittedFiles write_spectra_binary(const RunRecord& rec, const fs::path& dir) {
  static_assert(std::endian::native == std::endian::little, "binary spectra assume a little-endian host");
  EmittedFiles out;
  std::map<int, std::vector<const PointResult*>> by_n;
  for (const auto& pt : rec.points) {
    if (!pt.levels.empty()) by_n[pt.n_qubits].push_back(&pt);
  }
  if (by_n.empty()) throw NotFoundError("run record kept no levels to dump");
  fs::create_directories(dir);
  for (const auto& [n, pts] : by_n) {
    const std::string base = "spectra_nq" + std::to_string(n);
    std::ofstream bin(dir / (base + ".f64"), std::ios::binary);
    std::vector<double> eps;
    for (const auto* pt : pts) {
      for (double v : pt->levels) {
        bin.write(reinterpret_cast<const char*>(&v), sizeof v);
      }
      eps.push_back(pt->eps);
    }
    json side{{"file", base + ".f64"},
              {"dtype", "float64"},
              {"byte_order", "little"},
              {"layout", "row-major"},
              {"shape", {pts.size(), pts.front()->levels.size()}},
              {"rows", "eps"},
              {"eps", eps},
              {"n_q", n},
              {"config_hash", rec.config_hash}};
    std::ofstream(dir / (base + ".json")) << side.dump(2) << '\n';
    out.files.push_back(base + ".f64");
    out.files.push_back(base + ".json");
  }
  return out;
}

json manifest(const RunRecord& rec, const std::vector<std::string>& files) {
  json borders = json::array();
  for (const auto& b : rec.borders) {
    json entry{{"statistic", to_string(b.statistic)}, {"level", b.level}};
    if (b.fit) entry["fit"] = fit_json(*b.fit);
    if (b.free_fit) entry["free_fit"] = fit_json(*b.free_fit);
    borders.push_back(entry);
  }
  return json{{"version", rec.version},
              {"config", rec.config},
              {"config_hash", rec.config_hash},
              {"rng", kRngName},
              {"complete", rec.complete},
              {"wall_seconds", rec.wall_seconds},
              {"points", rec.points.size()},
              {"borders", borders},
              {"files", files}};
}

void write_manifest(const RunRecord& rec, const std::vector<std::string>& files, const fs::path& dir) {
  auto f = open_out(dir / "manifest.json");
  f << manifest(rec, files).dump(2) << '\n';
}

}  // namespace qchaos
