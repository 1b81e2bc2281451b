#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cptclone {

/// Uniform sampling of the transverse plane, centred on the optical axis:
/// x_i = (i - nx/2) dx. Counts must be powers of two.
struct TransverseGrid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 0.0;  // cm
  double dy = 0.0;  // cm

  void validate() const;

  std::size_t size() const { return nx * ny; }
  double x(std::size_t i) const { return (static_cast<double>(i) - static_cast<double>(nx / 2)) * dx; }
  double y(std::size_t j) const { return (static_cast<double>(j) - static_cast<double>(ny / 2)) * dy; }
  double cell_area() const { return dx * dy; }
  double extent_x() const { return static_cast<double>(nx) * dx; }
  double extent_y() const { return static_cast<double>(ny) * dy; }

  /// Angular spatial frequency [rad/cm] of DFT bin i, standard ordering
  /// (0, 1, ..., n/2-1, -n/2, ..., -1) * 2 pi / (n d).
  double kx(std::size_t i) const;
  double ky(std::size_t j) const;

  friend bool operator==(const TransverseGrid&, const TransverseGrid&) = default;
};

/// Complex envelope sampled on a grid, row-major: values[j * nx + i] is the
/// sample at (x_i, y_j).
struct ComplexField {
  TransverseGrid grid;
  std::vector<std::complex<double>> values;

  ComplexField() = default;
  explicit ComplexField(const TransverseGrid& g) : grid(g), values(g.size()) {}

  std::complex<double>& at(std::size_t i, std::size_t j) { return values[j * grid.nx + i]; }
  std::complex<double> at(std::size_t i, std::size_t j) const { return values[j * grid.nx + i]; }

  /// Sum of |value|^2 times the cell area.
  double power() const;
  bool all_finite() const;
};

/// |value|^2 per sample.
std::vector<double> intensity(const ComplexField& field);

}  // namespace cptclone
