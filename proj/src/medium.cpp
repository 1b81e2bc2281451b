#include "cptclone/medium.hpp"

#include <cmath>
#include <string>

#include "cptclone/error.hpp"

namespace cptclone {

double radiative_coupling(double density, double wavelength) {
  // 2 pi k N |d|^2 / (hbar gamma) with |d|^2 = 3 hbar gamma / (2 k^3).
  return 3.0 * density * wavelength * wavelength / (4.0 * kPi);
}

double MediumParams::kappa1() const {
  return kappa1_override ? *kappa1_override : radiative_coupling(density, lambda1);
}

double MediumParams::kappa2() const {
  return kappa2_override ? *kappa2_override : radiative_coupling(density, lambda2);
}

void MediumParams::validate() const {
  auto require = [](bool ok, const char* name, const char* rule) {
    if (!ok)
      throw Error(Errc::invalid_argument, std::string("medium parameter '") + name + "' " + rule);
  };
  require(std::isfinite(gamma) && gamma > 0.0, "gamma", "must be > 0");
  require(std::isfinite(big_gamma) && big_gamma >= 0.0, "big_gamma", "must be >= 0");
  require(std::isfinite(delta1), "delta1", "must be finite");
  require(std::isfinite(delta2), "delta2", "must be finite");
  require(std::isfinite(density) && density >= 0.0, "density", "must be >= 0");
  require(std::isfinite(lambda1) && lambda1 > 0.0, "lambda1", "must be > 0");
  require(std::isfinite(lambda2) && lambda2 > 0.0, "lambda2", "must be > 0");
  require(!kappa1_override || (std::isfinite(*kappa1_override) && *kappa1_override >= 0.0),
          "kappa1", "must be >= 0");
  require(!kappa2_override || (std::isfinite(*kappa2_override) && *kappa2_override >= 0.0),
          "kappa2", "must be >= 0");
}

namespace {

// Shared kernel, written out once for both the checked and the hot path.
// x = |g|^2, y = |G|^2.
inline void closed_form(const MediumParams& p, double x, double y, complex& n31, complex& n32,
                        double& d) {
  const double gm = p.gamma;
  const double gg = p.big_gamma;
  const double d1 = p.delta1;
  const double d2 = p.delta2;
  const double two_photon = gg * gg + (d2 - d1) * (d2 - d1);
  const double sum_term = gg * (d2 + d1);

  // N31 / g
  n31 = y * (gm * complex(d1, gm) * two_photon + (gm * complex(d2 - d1, gg) + sum_term) * x +
             gm * complex(d2 - d1, gg) * y);
  // N32 / G. The misprinted form has (i Gamma - Delta2 Delta1) inside the
  // |G|^2 bracket; the oracle and the g <-> G, 1 <-> 2 exchange symmetry both
  // give (i Gamma - Delta2 + Delta1).
  n32 = x * (gm * complex(d2, gm) * two_photon + gm * complex(d1 - d2, gg) * x +
             (gm * complex(d1 - d2, gg) + sum_term) * y);

  // The misprinted form has (gamma^2 + Delta2) in the pure |g|^2 line; the
  // correct factor is (gamma^2 + Delta2^2).
  d = gm * y * y * y +
      y * y * (3.0 * x * (gm + 2.0 * gg) + 2.0 * gm * (gm * gg + d1 * (d2 - d1))) +
      gm * x * (2.0 * x * (gm * gg + d2 * (d1 - d2)) + x * x + (gm * gm + d2 * d2) * two_photon) +
      y * (x * ((4.0 * gm + gg) * d2 * d2 + 2.0 * gm * gg * (2.0 * gm + 3.0 * gg) +
                2.0 * (gg - 4.0 * gm) * d2 * d1 + (4.0 * gm + gg) * d1 * d1) +
           3.0 * x * x * (gm + 2.0 * gg) + gm * (gm * gm + d1 * d1) * two_photon);
}

}  // namespace

ReducedCoefficients reduced_numerators(const MediumParams& params, double g2, double G2) {
  if (!(g2 >= 0.0) || !(G2 >= 0.0) || !std::isfinite(g2) || !std::isfinite(G2))
    throw Error(Errc::invalid_argument, "field intensities must be finite and >= 0");
  ReducedCoefficients r;
  if (g2 == 0.0 && G2 == 0.0) return r;
  closed_form(params, g2, G2, r.n31, r.n32, r.d);
  return r;
}

SusceptibilityPair susceptibility_from_intensity(const MediumParams& params, double g2,
                                                 double G2) noexcept {
  SusceptibilityPair out;
  if (g2 == 0.0 && G2 == 0.0) {
    out.no_field = true;
    return out;
  }
  complex n31, n32;
  double d = 0.0;
  closed_form(params, g2, G2, n31, n32, d);
  const double scale = params.gamma / d;
  out.c31 = params.kappa1() * scale * n31;
  out.c32 = params.kappa2() * scale * n32;
  return out;
}

SusceptibilityPair susceptibility(const MediumParams& params, const FieldPoint& f) {
  auto finite = [](complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  if (!finite(f.g) || !finite(f.G))
    throw Error(Errc::invalid_argument, "susceptibility: non-finite field amplitude");
  return susceptibility_from_intensity(params, std::norm(f.g), std::norm(f.G));
}

complex weak_probe_limit_check(const MediumParams& params, complex G) {
  if (!(std::abs(G) > 0.0))
    throw Error(Errc::invalid_argument, "weak_probe_limit_check: control amplitude must be nonzero");
  return susceptibility(params, {complex(1e-8 * params.gamma, 0.0), G}).c31;
}

}  // namespace cptclone
