#pragma once

// Split-operator integration of the coupled paraxial equations
//   dg/dz = i/(2 k1) lap g + i c31 g,   dG/dz = i/(2 k2) lap G + i c32 G,
// where (c31, c32) come from the local steady-state medium response.

#include <cstddef>
#include <functional>
#include <vector>

#include "cptclone/grid.hpp"
#include "cptclone/medium.hpp"
#include "cptclone/spectral.hpp"

namespace cptclone {

enum class Scheme { strang2, yoshida4 };
enum class NonlinearMode { frozen, predictor_corrector };

const char* to_string(Scheme s);
const char* to_string(NonlinearMode m);

/// Absorbing boundary layer. Inside the outer `fraction` of each half-axis the
/// field is attenuated at rate strength * s^2 [1/cm], s running 0 -> 1 across
/// the layer. A step of length h multiplies by exp(-h * rate), always in (0, 1].
struct Absorber {
  double fraction = 0.1;
  double strength = 50.0;  // 1/cm at the outer edge
  bool enabled() const { return fraction > 0.0 && strength > 0.0; }
  friend bool operator==(const Absorber&, const Absorber&) = default;
};

struct StepConfig {
  double dz = 10e-4;  // cm
  Scheme scheme = Scheme::strang2;
  NonlinearMode mode = NonlinearMode::frozen;
  Absorber absorber;

  void validate() const;
  friend bool operator==(const StepConfig&, const StepConfig&) = default;
};

struct FieldState {
  ComplexField probe;
  ComplexField control;
  double z = 0.0;  // cm
};

struct SnapshotPlan {
  std::vector<double> positions;  // cm

  /// 0, interval, 2 interval, ... up to and including z_end.
  static SnapshotPlan uniform(double interval, double z_end);
};

struct Snapshot {
  double requested_z = 0.0;
  std::size_t step_index = 0;
  FieldState state;
};

struct PropagationResult {
  FieldState final_state;
  std::vector<Snapshot> snapshots;
  std::size_t steps = 0;
};

/// Called after every completed step with (state, steps done, total steps).
using StepObserver = std::function<void(const FieldState&, std::size_t, std::size_t)>;

/// Owns the FFT plans and cached phase/mask tables for one grid.
class Propagator {
 public:
  Propagator(const TransverseGrid& grid, MediumParams params, StepConfig config);

  void diffraction_step(ComplexField& field, double k, double dz);
  void medium_step(FieldState& state, double dz) const;
  /// One full step of length dz (config.dz when omitted), absorber included.
  void step(FieldState& state, double dz);
  void step(FieldState& state) { step(state, config_.dz); }

  const StepConfig& config() const { return config_; }
  const MediumParams& params() const { return params_; }

 private:
  struct Kernel {
    double k;
    double dz;
    std::vector<std::complex<double>> phase;
  };
  struct Mask {
    double dz;
    std::vector<double> values;
  };

  const std::vector<std::complex<double>>& diffraction_kernel(double k, double dz);
  const std::vector<double>& absorber_mask(double dz);
  void strang(FieldState& state, double h);

  TransverseGrid grid_;
  MediumParams params_;
  StepConfig config_;
  Fft2d fft_;
  std::vector<Kernel> kernels_;
  std::vector<Mask> masks_;
};

ComplexField diffraction_step(const ComplexField& field, double k, double dz);
FieldState medium_step(const FieldState& state, const MediumParams& params, double dz,
                       NonlinearMode mode);
FieldState step(const FieldState& state, const MediumParams& params, const StepConfig& config);

/// Steps from state0.z to z_end; the final step is shortened to land on z_end
/// exactly. Each requested snapshot is taken at the completed step nearest to
/// it (ties go to the earlier step). Throws Error(non_finite) with the z
/// position if a field blows up.
PropagationResult propagate(const FieldState& state0, const MediumParams& params,
                            const StepConfig& config, double z_end, const SnapshotPlan& plan,
                            const StepObserver& observer = {});

}  // namespace cptclone
