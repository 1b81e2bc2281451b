#include "cptclone/grid.hpp"

#include <cmath>

#include "cptclone/error.hpp"
#include "cptclone/medium.hpp"

namespace cptclone {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double frequency(std::size_t i, std::size_t n, double d) {
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  auto idx = static_cast<std::ptrdiff_t>(i);
  if (idx >= half) idx -= static_cast<std::ptrdiff_t>(n);
  return 2.0 * kPi * static_cast<double>(idx) / (static_cast<double>(n) * d);
}

}  // namespace

void TransverseGrid::validate() const {
  if (!is_power_of_two(nx) || !is_power_of_two(ny))
    throw Error(Errc::invalid_argument, "grid counts must be powers of two");
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy))
    throw Error(Errc::invalid_argument, "grid spacing must be positive and finite");
}

double TransverseGrid::kx(std::size_t i) const { return frequency(i, nx, dx); }
double TransverseGrid::ky(std::size_t j) const { return frequency(j, ny, dy); }

double ComplexField::power() const {
  double sum = 0.0;
  for (const auto& v : values) sum += std::norm(v);
  return sum * grid.cell_area();
}

bool ComplexField::all_finite() const {
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

std::vector<double> intensity(const ComplexField& field) {
  std::vector<double> out(field.values.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::norm(field.values[k]);
  return out;
}

}  // namespace cptclone
