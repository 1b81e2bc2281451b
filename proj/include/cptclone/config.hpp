#pragma once

// Run configuration: a flat INI-style text with [section] headers and
// `key = value` lines. '#' and ';' start comments.
//
// Units. Rates, detunings and amplitudes are in units of gamma (a bare
// number, or suffixed "gamma"). Lengths accept nm, um, mm or cm (bare = cm).
// Densities are atoms/cm^3 (bare or "cm^-3"); couplings are 1/cm (bare or
// "cm^-1").

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cptclone/beams.hpp"
#include "cptclone/medium.hpp"
#include "cptclone/propagator.hpp"

namespace cptclone {

struct GridSpec {
  std::size_t nx = 512;
  std::size_t ny = 512;
  double half_width_x = 0.2;  // cm
  double half_width_y = 0.2;  // cm

  TransverseGrid grid() const;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct ScanSpec {
  char axis = 'x';
  double fixed = 0.0;  // cm, coordinate along the other axis
  friend bool operator==(const ScanSpec&, const ScanSpec&) = default;
};

struct RunConfig {
  MediumParams medium;
  BeamSpec probe = SuperGaussian{};
  BeamSpec control = HermiteGaussian{};
  GridSpec grid;
  StepConfig step;
  double z_end = 0.0;                      // cm
  std::optional<double> snapshot_every;    // cm
  std::vector<double> snapshots;           // cm, explicit positions
  ScanSpec scan;
  std::filesystem::path output_dir = "out";

  /// Requested positions plus the entrance and exit planes, sorted, unique.
  SnapshotPlan snapshot_plan() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ParseError (with line number and key) on unknown sections or keys,
/// duplicate keys, missing required keys, malformed numbers, unit
/// violations, and out-of-range values. Relative image paths are resolved
/// against `base_dir`.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text with every effective value (derived couplings as
/// comments). parse_config(echo_config(c)) == c.
std::string echo_config(const RunConfig& config);

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double value);

}  // namespace cptclone
