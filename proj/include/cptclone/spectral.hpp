#pragma once

#include <complex>
#include <span>

#include "cptclone/grid.hpp"

namespace cptclone {

/// In-place 2D DFT on an owned, FFTW-aligned buffer of grid.size() samples.
/// Plans use FFTW_ESTIMATE so the transform (and its rounding) is the same
/// on every run. Transforms are unnormalised.
class Fft2d {
 public:
  explicit Fft2d(const TransverseGrid& grid);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;
  Fft2d(Fft2d&& other) noexcept;
  Fft2d& operator=(Fft2d&& other) noexcept;

  std::span<std::complex<double>> buffer() { return {data_, size_}; }
  void forward();
  void inverse();

 private:
  void release() noexcept;

  std::complex<double>* data_ = nullptr;
  std::size_t size_ = 0;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace cptclone
