#include "cptclone/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cptclone/error.hpp"

namespace cptclone {

const char* to_string(Scheme s) { return s == Scheme::strang2 ? "strang2" : "yoshida4"; }

const char* to_string(NonlinearMode m) {
  return m == NonlinearMode::frozen ? "frozen" : "predictor_corrector";
}

void StepConfig::validate() const {
  if (!(dz > 0.0) || !std::isfinite(dz)) throw Error(Errc::invalid_argument, "dz must be > 0");
  if (!(absorber.fraction >= 0.0 && absorber.fraction <= 0.5))
    throw Error(Errc::invalid_argument, "absorber fraction must be in [0, 0.5]");
  if (!(absorber.strength >= 0.0) || !std::isfinite(absorber.strength))
    throw Error(Errc::invalid_argument, "absorber strength must be >= 0");
}

SnapshotPlan SnapshotPlan::uniform(double interval, double z_end) {
  if (!(interval > 0.0)) throw Error(Errc::invalid_argument, "snapshot interval must be > 0");
  SnapshotPlan plan;
  const auto count = static_cast<std::size_t>(std::floor(z_end / interval + 1e-9));
  for (std::size_t k = 0; k <= count; ++k) plan.positions.push_back(static_cast<double>(k) * interval);
  if (z_end - plan.positions.back() > 1e-9 * interval) plan.positions.push_back(z_end);
  return plan;
}

Propagator::Propagator(const TransverseGrid& grid, MediumParams params, StepConfig config)
    : grid_(grid), params_(std::move(params)), config_(config), fft_(grid) {
  params_.validate();
  config_.validate();
}

const std::vector<std::complex<double>>& Propagator::diffraction_kernel(double k, double dz) {
  for (const auto& kernel : kernels_)
    if (kernel.k == k && kernel.dz == dz) return kernel.phase;
  if (kernels_.size() > 16) kernels_.erase(kernels_.begin());

  Kernel kernel{k, dz, std::vector<std::complex<double>>(grid_.size())};
  const double norm = 1.0 / static_cast<double>(grid_.size());
  const double factor = -dz / (2.0 * k);
  for (std::size_t j = 0; j < grid_.ny; ++j) {
    const double ky = grid_.ky(j);
    for (std::size_t i = 0; i < grid_.nx; ++i) {
      const double kx = grid_.kx(i);
      const double phi = factor * (kx * kx + ky * ky);
      kernel.phase[j * grid_.nx + i] = norm * std::complex<double>(std::cos(phi), std::sin(phi));
    }
  }
  kernels_.push_back(std::move(kernel));
  return kernels_.back().phase;
}

const std::vector<double>& Propagator::absorber_mask(double dz) {
  for (const auto& mask : masks_)
    if (mask.dz == dz) return mask.values;
  if (masks_.size() > 4) masks_.erase(masks_.begin());

  const auto& a = config_.absorber;
  auto ramp = [&](double coord, double half_extent) {
    const double u = std::abs(coord) / half_extent;
    const double s = (u - (1.0 - a.fraction)) / a.fraction;
    return s > 0.0 ? s * s : 0.0;
  };
  Mask mask{dz, std::vector<double>(grid_.size())};
  const double hx = 0.5 * grid_.extent_x();
  const double hy = 0.5 * grid_.extent_y();
  for (std::size_t j = 0; j < grid_.ny; ++j)
    for (std::size_t i = 0; i < grid_.nx; ++i) {
      const double rate = a.strength * (ramp(grid_.x(i), hx) + ramp(grid_.y(j), hy));
      mask.values[j * grid_.nx + i] = std::exp(-dz * rate);
    }
  masks_.push_back(std::move(mask));
  return masks_.back().values;
}

void Propagator::diffraction_step(ComplexField& field, double k, double dz) {
  if (!(field.grid == grid_)) throw Error(Errc::invalid_argument, "field grid mismatch");
  const auto& phase = diffraction_kernel(k, dz);
  auto buf = fft_.buffer();
  std::copy(field.values.begin(), field.values.end(), buf.begin());
  fft_.forward();
  for (std::size_t n = 0; n < buf.size(); ++n) buf[n] *= phase[n];
  fft_.inverse();
  std::copy(buf.begin(), buf.end(), field.values.begin());
}

namespace {

[[noreturn]] void non_finite_medium(double z, std::size_t index) {
  std::ostringstream msg;
  msg << "non-finite susceptibility at z = " << z << " cm, sample " << index;
  throw Error(Errc::non_finite, msg.str());
}

}  // namespace

void Propagator::medium_step(FieldState& state, double dz) const {
  auto& g = state.probe.values;
  auto& G = state.control.values;
  if (!(state.probe.grid == grid_) || !(state.control.grid == grid_))
    throw Error(Errc::invalid_argument, "field grid mismatch");
  if (params_.kappa1() == 0.0 && params_.kappa2() == 0.0) return;
  const std::complex<double> i_dz(0.0, dz);
  const bool corrector = config_.mode == NonlinearMode::predictor_corrector;
  const std::complex<double> i_half_dz(0.0, 0.5 * dz);

  for (std::size_t n = 0; n < g.size(); ++n) {
    auto chi = susceptibility_from_intensity(params_, std::norm(g[n]), std::norm(G[n]));
    if (corrector && !chi.no_field) {
      const auto gh = g[n] * std::exp(i_half_dz * chi.c31);
      const auto Gh = G[n] * std::exp(i_half_dz * chi.c32);
      chi = susceptibility_from_intensity(params_, std::norm(gh), std::norm(Gh));
    }
    if (!std::isfinite(chi.c31.real()) || !std::isfinite(chi.c31.imag()) ||
        !std::isfinite(chi.c32.real()) || !std::isfinite(chi.c32.imag()))
      non_finite_medium(state.z, n);
    if (chi.no_field) continue;
    g[n] *= std::exp(i_dz * chi.c31);
    G[n] *= std::exp(i_dz * chi.c32);
  }
}

void Propagator::strang(FieldState& state, double h) {
  diffraction_step(state.probe, params_.k1(), 0.5 * h);
  diffraction_step(state.control, params_.k2(), 0.5 * h);
  medium_step(state, h);
  diffraction_step(state.probe, params_.k1(), 0.5 * h);
  diffraction_step(state.control, params_.k2(), 0.5 * h);
}

void Propagator::step(FieldState& state, double dz) {
  if (!(dz > 0.0)) throw Error(Errc::invalid_argument, "step length must be > 0");
  if (config_.scheme == Scheme::strang2) {
    strang(state, dz);
  } else {
    const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    const double w0 = 1.0 - 2.0 * w1;
    strang(state, w1 * dz);
    strang(state, w0 * dz);
    strang(state, w1 * dz);
  }
  if (config_.absorber.enabled()) {
    const auto& mask = absorber_mask(dz);
    for (std::size_t n = 0; n < mask.size(); ++n) {
      state.probe.values[n] *= mask[n];
      state.control.values[n] *= mask[n];
    }
  }
  state.z += dz;
}

ComplexField diffraction_step(const ComplexField& field, double k, double dz) {
  if (!(k > 0.0)) throw Error(Errc::invalid_argument, "wavenumber must be > 0");
  Fft2d fft(field.grid);
  auto buf = fft.buffer();
  std::copy(field.values.begin(), field.values.end(), buf.begin());
  fft.forward();
  const auto& grid = field.grid;
  const double norm = 1.0 / static_cast<double>(grid.size());
  for (std::size_t j = 0; j < grid.ny; ++j)
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const double kx = grid.kx(i), ky = grid.ky(j);
      const double phi = -dz * (kx * kx + ky * ky) / (2.0 * k);
      buf[j * grid.nx + i] *= norm * std::complex<double>(std::cos(phi), std::sin(phi));
    }
  fft.inverse();
  ComplexField out(grid);
  std::copy(buf.begin(), buf.end(), out.values.begin());
  return out;
}

FieldState medium_step(const FieldState& state, const MediumParams& params, double dz,
                       NonlinearMode mode) {
  StepConfig config;
  config.dz = dz;
  config.mode = mode;
  config.absorber.strength = 0.0;
  Propagator p(state.probe.grid, params, config);
  FieldState out = state;
  p.medium_step(out, dz);
  return out;
}

FieldState step(const FieldState& state, const MediumParams& params, const StepConfig& config) {
  Propagator p(state.probe.grid, params, config);
  FieldState out = state;
  p.step(out);
  return out;
}

PropagationResult propagate(const FieldState& state0, const MediumParams& params,
                            const StepConfig& config, double z_end, const SnapshotPlan& plan,
                            const StepObserver& observer) {
  config.validate();
  if (!(state0.probe.grid == state0.control.grid))
    throw Error(Errc::invalid_argument, "probe and control must share a grid");
  if (!(z_end >= state0.z) || !std::isfinite(z_end))
    throw Error(Errc::invalid_argument, "z_end must not precede the initial position");

  const double length = z_end - state0.z;
  std::size_t steps = 0;
  if (length > 0.0) {
    steps = static_cast<std::size_t>(std::ceil(length / config.dz - 1e-9));
    steps = std::max<std::size_t>(steps, 1);
  }
  auto z_at = [&](std::size_t k) {
    return k == steps ? z_end : state0.z + static_cast<double>(k) * config.dz;
  };

  // Requested position -> nearest step boundary.
  std::vector<std::pair<std::size_t, double>> wanted;
  for (double z : plan.positions) {
    if (z < state0.z - 1e-12 || z > z_end + 1e-12)
      throw Error(Errc::invalid_argument, "snapshot position outside the propagation range");
    const double t = (z - state0.z) / config.dz;
    auto k = static_cast<std::size_t>(std::clamp(std::floor(t), 0.0, static_cast<double>(steps)));
    if (k < steps && std::abs(z_at(k + 1) - z) < std::abs(z - z_at(k))) ++k;
    wanted.emplace_back(k, z);
  }

  PropagationResult result;
  result.steps = steps;
  FieldState state = state0;
  auto record = [&](std::size_t k) {
    for (const auto& [index, z] : wanted)
      if (index == k) result.snapshots.push_back({z, k, state});
  };
  record(0);
  if (steps > 0) {
    Propagator propagator(state0.probe.grid, params, config);
    for (std::size_t k = 1; k <= steps; ++k) {
      // Interior steps use dz verbatim so the cached kernels are reused.
      const double h = k == steps ? z_end - z_at(k - 1) : config.dz;
      propagator.step(state, h);
      state.z = z_at(k);
      if (!state.probe.all_finite() || !state.control.all_finite()) {
        std::ostringstream msg;
        msg << "field became non-finite at z = " << state.z << " cm (step " << k << ")";
        throw Error(Errc::non_finite, msg.str());
      }
      record(k);
      if (observer) observer(state, k, steps);
    }
  }
  std::stable_sort(result.snapshots.begin(), result.snapshots.end(),
                   [](const Snapshot& a, const Snapshot& b) { return a.step_index < b.step_index; });
  result.final_state = std::move(state);
  return result;
}

}  // namespace cptclone
