#pragma once

#include <span>
#include <vector>

#include "cptclone/grid.hpp"
#include "cptclone/propagator.hpp"

namespace cptclone {

struct BeamMetrics {
  double fwhm_x = 0.0;  // cm, intensity FWHM of the dominant lobe
  double fwhm_y = 0.0;
  double w2m_x = 0.0;   // cm, 2 * sqrt(second central moment)
  double w2m_y = 0.0;
  double peak_intensity = 0.0;
  double total_power = 0.0;  // sum |f|^2 dx dy
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  int lobe_count = 0;
};

/// One intensity maximum along a line profile.
struct Lobe {
  std::size_t index = 0;
  double position = 0.0;  // cm
  double peak = 0.0;
  double prominence = 0.0;
  double fwhm = 0.0;      // cm, crossings of peak/2 by linear interpolation
};

/// Local maxima whose topographic prominence is at least
/// `min_prominence_fraction` of the global maximum of `profile`, sorted by
/// position. A lobe whose half-maximum crossing is not found before the end
/// of the profile gets fwhm = 0.
std::vector<Lobe> find_lobes(std::span<const double> profile, double origin, double step,
                             double min_prominence_fraction = 0.1);

/// Throws Error(zero_power) for an all-zero field and Error(not_localized)
/// when the dominant lobe has no half-maximum crossing (e.g. a plane wave).
/// FWHM is measured on the row/column through the intensity centroid, or
/// through the global peak when the centroid line is dark (split beams).
BeamMetrics beam_metrics(const ComplexField& field);

enum class Which { probe, control };

/// Ratio of total powers out/in. Throws Error(zero_power) for a dark input.
double transmission(const ComplexField& in, const ComplexField& out);
double transmission(const FieldState& in, const FieldState& out, Which which);

double rayleigh_length(double w0, double lambda);

/// Largest normalised zero-mean cross-correlation between |a|^2 and |b|^2
/// over cyclic integer shifts up to 5% of the grid along each axis.
/// Symmetric in its arguments. Throws Error(zero_power) for a flat input.
double cloning_fidelity(const ComplexField& a, const ComplexField& b);

/// Brute-force reference for cloning_fidelity with an explicit shift window.
double cloning_fidelity_direct(const ComplexField& a, const ComplexField& b, std::size_t max_shift_x,
                               std::size_t max_shift_y);

/// Feature size of `a` relative to `b`: geometric mean over matched lobes
/// (along the metric row and column) of fwhm_a / fwhm_b.
double feature_size_ratio(const ComplexField& a, const ComplexField& b);

}  // namespace cptclone
