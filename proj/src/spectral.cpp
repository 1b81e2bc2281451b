#include "cptclone/spectral.hpp"

#include <fftw3.h>

#include <mutex>
#include <utility>

#include "cptclone/error.hpp"

namespace cptclone {

namespace {
// The FFTW planner is not re-entrant.
std::mutex planner_mutex;
}  // namespace

Fft2d::Fft2d(const TransverseGrid& grid) : size_(grid.size()) {
  grid.validate();
  std::lock_guard lock(planner_mutex);
  data_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * size_));
  if (!data_) throw Error(Errc::invalid_argument, "FFT buffer allocation failed");
  auto* raw = reinterpret_cast<fftw_complex*>(data_);
  const int n0 = static_cast<int>(grid.ny);
  const int n1 = static_cast<int>(grid.nx);
  forward_plan_ = fftw_plan_dft_2d(n0, n1, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_2d(n0, n1, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!forward_plan_ || !inverse_plan_) {
    release();
    throw Error(Errc::invalid_argument, "FFTW planning failed");
  }
}

Fft2d::~Fft2d() {
  std::lock_guard lock(planner_mutex);
  release();
}

Fft2d::Fft2d(Fft2d&& other) noexcept
    : data_(std::exchange(other.data_, nullptr)),
      size_(std::exchange(other.size_, 0)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

Fft2d& Fft2d::operator=(Fft2d&& other) noexcept {
  if (this != &other) {
    {
      std::lock_guard lock(planner_mutex);
      release();
    }
    data_ = std::exchange(other.data_, nullptr);
    size_ = std::exchange(other.size_, 0);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
  }
  return *this;
}

void Fft2d::release() noexcept {
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  if (data_) fftw_free(data_);
  forward_plan_ = inverse_plan_ = nullptr;
  data_ = nullptr;
}

void Fft2d::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void Fft2d::inverse() { fftw_execute(static_cast<fftw_plan>(inverse_plan_)); }

}  // namespace cptclone
