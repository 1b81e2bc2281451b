#pragma once

// Run orchestration behind the CLI subcommands.
//
// A propagate run directory holds, for snapshot k (three digits):
//   snap_k_probe.cptf, snap_k_control.cptf   raw fields
//   snap_k_probe.pgm,  snap_k_control.pgm    16-bit intensity, peak = 65535
//   snap_k_*.pgm.txt                         peak intensity of that render
// plus metrics.csv and config.echo.ini. Snapshot 0 is always the entrance
// plane and the last one is always z_end.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cptclone/config.hpp"
#include "cptclone/propagator.hpp"

namespace cptclone {

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "CPTCLONE_OUTPUT_DIR";

/// Command-line value, then the environment, then the config file.
std::filesystem::path resolve_output_dir(const std::optional<std::filesystem::path>& flag,
                                         const RunConfig& config);

/// One row per grid sample along the scan line of config.scan.
std::string chi_scan_csv(const RunConfig& config);

/// Writes chi_scan.csv into out_dir; returns its path.
std::filesystem::path run_chi_scan(const RunConfig& config, const std::filesystem::path& out_dir);

struct SnapshotFields {
  std::size_t index = 0;
  double z = 0.0;
  ComplexField probe;
  ComplexField control;
};

/// metrics.csv text. `snapshots` must start with the entrance plane, which
/// provides the reference powers and the control-in pattern.
std::string metrics_csv(const std::vector<SnapshotFields>& snapshots);

struct RunSummary {
  std::size_t steps = 0;
  std::vector<SnapshotFields> snapshots;
  std::vector<std::filesystem::path> files;
};

/// Propagates and writes the run directory. On failure every file written
/// so far is removed (and the directory itself if this run created it).
RunSummary run_propagation(const RunConfig& config, const std::filesystem::path& out_dir,
                           const StepObserver& observer = {});

/// Snapshots read back from a run directory, ordered by index.
std::vector<SnapshotFields> load_run(const std::filesystem::path& run_dir);

/// Recomputes metrics.csv from the field files in run_dir.
std::string analyze_run(const std::filesystem::path& run_dir);

/// Robustness of the fidelity metric: each exit field is compared against a
/// copy of itself with complex Gaussian noise of `noise_fraction` times the
/// peak amplitude added (deterministic for a given seed).
std::string noise_fidelity_csv(const SnapshotFields& exit_plane, const ComplexField& control_in,
                               std::uint64_t seed, double noise_fraction = 0.05);

}  // namespace cptclone
