#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include "cptclone/grid.hpp"
#include "cptclone/image.hpp"

namespace cptclone {

/// Hermite-Gaussian amp * H_m(sqrt2 x/w) H_n(sqrt2 y/w) exp(-(x^2+y^2)/w^2).
struct HermiteGaussian {
  int m = 0;
  int n = 0;
  double width = 0.0;  // cm
  double amplitude = 0.0;
  friend bool operator==(const HermiteGaussian&, const HermiteGaussian&) = default;
};

/// Flat-top amp * exp(-(r^2/w^2)^order).
struct SuperGaussian {
  double width = 0.0;  // cm
  int order = 8;
  double amplitude = 0.0;
  friend bool operator==(const SuperGaussian&, const SuperGaussian&) = default;
};

struct PlaneWave {
  double amplitude = 0.0;
  friend bool operator==(const PlaneWave&, const PlaneWave&) = default;
};

/// Grayscale raster mapped linearly (luma -> amplitude) onto the grid centre.
struct ImageBeam {
  std::filesystem::path source;
  double amplitude = 0.0;
  double blur_sigma = 0.0;              // cm, 0 disables smoothing
  std::optional<double> extent;         // physical image width [cm]; default half the grid width
  friend bool operator==(const ImageBeam&, const ImageBeam&) = default;
};

using BeamSpec = std::variant<HermiteGaussian, SuperGaussian, PlaneWave, ImageBeam>;

void validate(const BeamSpec& spec);
double amplitude_of(const BeamSpec& spec);

/// Physicists' Hermite polynomial H_k(x) by upward recurrence.
double hermite(int k, double x);

ComplexField synth_hermite_gaussian(const TransverseGrid& grid, int m, int n, double width,
                                    double amplitude);
ComplexField synth_super_gaussian(const TransverseGrid& grid, double width, int order,
                                  double amplitude);
ComplexField synth_plane_wave(const TransverseGrid& grid, double amplitude);

/// Bilinear resampling of `image` onto a centred window `extent` cm wide
/// (height follows the aspect ratio), scaled so the brightest pixel maps to
/// `amplitude`, then smoothed by a normalised Gaussian of width `blur_sigma`.
/// Samples outside the window are zero. Image row 0 is the top (+y) edge.
ComplexField synth_from_image(const TransverseGrid& grid, const GrayImage& image, double amplitude,
                              double blur_sigma, std::optional<double> extent = std::nullopt);

/// Separable Gaussian smoothing with zero padding; the kernel is truncated
/// at 4 sigma and normalised to unit sum.
ComplexField gaussian_blur(const ComplexField& field, double sigma);

/// Dispatch on the spec. Image sources are read from disk.
ComplexField synthesize(const TransverseGrid& grid, const BeamSpec& spec);

/// Pointwise value of an analytic profile; nullopt for image beams.
std::optional<std::complex<double>> sample_analytic(const BeamSpec& spec, double x, double y);

}  // namespace cptclone
