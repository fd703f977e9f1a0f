#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "postopt/calibration.hpp"
#include "postopt/config.hpp"
#include "postopt/types.hpp"

namespace postopt {

/// Parse Z/Y files into validated DiscrepancyData: consistent row counts
/// against the mesh, numeric payload, controller rank check.
DiscrepancyData ingest_data(const std::filesystem::path& z_path,
                            const std::filesystem::path& y_path, int n_nodes);

/// Persist/reload a PosteriorMean as a directory of CSVs plus a JSON scalar
/// table (u_ell.csv, u_shift.csv, w.csv, scalars.json). z_tilde and Z live in
/// their own artifacts and are passed back in at load time.
void save_posterior_mean(const std::filesystem::path& dir, const PosteriorMean& pm,
                         const Vector& mesh_nodes);
PosteriorMean load_posterior_mean(const std::filesystem::path& dir, const ControlVector& z_tilde,
                                  const Matrix& Z);

/// Run the configured stages in canonical dependency order. Every stage reads
/// its inputs from the output directory (or the configured data paths), writes
/// its artifacts, and appends a manifest line `stage=... wall_ms=...
/// inputs=name:hash,...` to manifest.txt. Identical configuration and seed
/// reproduce all artifacts byte for byte; wall_ms is the only varying field.
void run_pipeline(const RunConfig& cfg);

/// Dense-oracle self check (tiny fixtures); returns max relative error per
/// identity. Used by the oracle-check stage.
std::map<std::string, double> run_oracle_checks();

}  // namespace postopt
