#pragma once

#include <cmath>
#include <random>

#include "cptclone/medium.hpp"

namespace support {

// Log-uniform fields in [1e-3, 10], detunings in [-5, 5], Gamma in [1e-4, 1].
struct Draw {
  cptclone::MediumParams params;
  cptclone::FieldPoint field;
};

inline Draw random_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return std::pow(10.0, std::log10(lo) + u(rng) * (std::log10(hi) - std::log10(lo)));
  };
  auto phase = [&] { return std::polar(1.0, 2.0 * cptclone::kPi * u(rng)); };
  Draw d;
  d.params.delta1 = -5.0 + 10.0 * u(rng);
  d.params.delta2 = -5.0 + 10.0 * u(rng);
  d.params.big_gamma = log_uniform(1e-4, 1.0);
  d.params.density = 5e11;
  d.field.g = log_uniform(1e-3, 10.0) * phase();
  d.field.G = log_uniform(1e-3, 10.0) * phase();
  return d;
}

inline double rel_err(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) / std::abs(b);
}

}  // namespace support
