#pragma once

// Steady-state response of a three-level Lambda medium to a probe field g
// (|1> <-> |3>) and a control field G (|2> <-> |3>) of arbitrary strength.
//
// Units: every rate, detuning and Rabi amplitude is expressed in units of the
// optical coherence decay rate gamma (gamma = 1 by default). Lengths are in cm.

#include <array>
#include <complex>
#include <optional>

namespace cptclone {

using complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Rb D1 wavelength [cm].
inline constexpr double kDefaultWavelength = 795e-7;

/// Propagation coupling 2*pi*k*N*|d|^2/(hbar*gamma) [1/cm] for a transition
/// whose dipole is fixed by its radiative branch rate.
double radiative_coupling(double density, double wavelength);

struct MediumParams {
  double gamma = 1.0;      // optical coherence decay, reference unit
  double big_gamma = 0.0;  // ground-state coherence decay
  double delta1 = 0.0;     // probe detuning  w31 - w1
  double delta2 = 0.0;     // control detuning w32 - w2
  double density = 0.0;    // atoms / cm^3
  double lambda1 = kDefaultWavelength;
  double lambda2 = kDefaultWavelength;
  std::optional<double> kappa1_override;
  std::optional<double> kappa2_override;

  double kappa1() const;
  double kappa2() const;
  double k1() const { return 2.0 * kPi / lambda1; }
  double k2() const { return 2.0 * kPi / lambda2; }

  /// Throws Error(invalid_argument) naming the offending field.
  void validate() const;

  friend bool operator==(const MediumParams&, const MediumParams&) = default;
};

struct FieldPoint {
  complex g;  // probe Rabi amplitude
  complex G;  // control Rabi amplitude
};

/// Closed-form steady-state coefficients with the field factor divided out:
/// sigma31 = g * n31 / d, sigma32 = G * n32 / d. n31, n32 and d depend only on
/// |g|^2 and |G|^2.
struct ReducedCoefficients {
  complex n31;
  complex n32;
  double d = 0.0;

  /// No light at this point: d vanishes and both coherences are zero.
  bool no_field() const { return d == 0.0; }
};

ReducedCoefficients reduced_numerators(const MediumParams& params, double g2, double G2);

/// Susceptibilities scaled for the propagation equations:
/// c31 = 2 pi k1 chi31 and c32 = 2 pi k2 chi32, both in 1/cm.
struct SusceptibilityPair {
  complex c31;
  complex c32;
  bool no_field = false;
};

SusceptibilityPair susceptibility(const MediumParams& params, const FieldPoint& f);

/// Same as susceptibility() but from the intensities directly; used in the
/// per-pixel propagation loop. No validation.
SusceptibilityPair susceptibility_from_intensity(const MediumParams& params, double g2,
                                                 double G2) noexcept;

/// Steady-state density matrix. Levels are numbered 1..3 as in the Lambda
/// scheme; (i, j) returns sigma_ij.
class SteadyStateDM {
 public:
  SteadyStateDM() = default;
  explicit SteadyStateDM(const std::array<complex, 9>& rho) : rho_(rho) {}

  complex operator()(int i, int j) const { return rho_[(i - 1) * 3 + (j - 1)]; }
  const std::array<complex, 9>& raw() const { return rho_; }
  complex trace() const { return rho_[0] + rho_[4] + rho_[8]; }

 private:
  std::array<complex, 9> rho_{};
};

/// Independent numerical steady state: builds the Liouvillian of the master
/// equation and solves the stationary system with the trace constraint in
/// quad precision. Throws Error(non_unique_steady_state) when the stationary
/// state is not unique (e.g. no driving fields).
SteadyStateDM steady_state_oracle(const MediumParams& params, const FieldPoint& f);

/// Right-hand side of the density-matrix equations evaluated at rho; the
/// steady state has every entry ~0. Exposed for residual checks.
std::array<complex, 9> liouvillian_rate(const MediumParams& params, const FieldPoint& f,
                                        const std::array<complex, 9>& rho);

/// c31 at a vanishingly weak probe (g = 1e-8 gamma). Test helper.
complex weak_probe_limit_check(const MediumParams& params, complex G);

}  // namespace cptclone
