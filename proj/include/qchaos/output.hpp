// CSV artifacts, the JSON run manifest and raw binary spectra.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qchaos/eigenstates.hpp"
#include "qchaos/sweep.hpp"

namespace qchaos {

enum class Artifact { SpacingHist, EtaCurve, BorderTable, HusimiGrid, LevelsVsEps };

Artifact parse_artifact(const std::string& name);
std::string to_string(Artifact a);

/// Files written by one emit call, relative to the output directory.
struct EmittedFiles {
  std::vector<std::string> files;
};

/// Writes the requested CSV artifacts for a run record. Throws NotFoundError
/// if the record lacks the data for one of them (no border table, no kept
/// levels). HusimiGrid is written separately with write_husimi.
EmittedFiles emit_outputs(const RunRecord& rec, const std::vector<Artifact>& artifacts,
                          const std::filesystem::path& dir);

/// theta, p, density rows.
std::string write_husimi(const HusimiGrid& grid, const std::filesystem::path& file);

/// Little-endian float64 quasi-energies, one row of N values per point with
/// kept levels, plus a JSON sidecar describing the layout.
EmittedFiles write_spectra_binary(const RunRecord& rec, const std::filesystem::path& dir);

nlohmann::json manifest(const RunRecord& rec, const std::vector<std::string>& files);
void write_manifest(const RunRecord& rec, const std::vector<std::string>& files,
                    const std::filesystem::path& dir);

}  // namespace qchaos
