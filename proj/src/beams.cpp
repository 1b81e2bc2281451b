#include "cptclone/beams.hpp"

#include <algorithm>
#include <cmath>

#include "cptclone/error.hpp"

namespace cptclone {

double hermite(int k, double x) {
  if (k < 0) throw Error(Errc::invalid_argument, "hermite: order must be >= 0");
  double prev = 1.0;
  if (k == 0) return prev;
  double curr = 2.0 * x;
  for (int n = 1; n < k; ++n) {
    const double next = 2.0 * x * curr - 2.0 * n * prev;
    prev = curr;
    curr = next;
  }
  return curr;
}

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw Error(Errc::invalid_argument, message);
}

template <typename Fn>
ComplexField fill(const TransverseGrid& grid, Fn&& value_at) {
  grid.validate();
  ComplexField field(grid);
  for (std::size_t j = 0; j < grid.ny; ++j)
    for (std::size_t i = 0; i < grid.nx; ++i) field.at(i, j) = value_at(grid.x(i), grid.y(j));
  return field;
}

double hermite_gaussian_value(const HermiteGaussian& b, double x, double y) {
  const double s = std::sqrt(2.0) / b.width;
  return b.amplitude * hermite(b.m, s * x) * hermite(b.n, s * y) *
         std::exp(-(x * x + y * y) / (b.width * b.width));
}

double super_gaussian_value(const SuperGaussian& b, double x, double y) {
  const double r2 = (x * x + y * y) / (b.width * b.width);
  return b.amplitude * std::exp(-std::pow(r2, b.order));
}

}  // namespace

void validate(const BeamSpec& spec) {
  std::visit(
      [](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        require(std::isfinite(b.amplitude) && b.amplitude >= 0.0, "beam amplitude must be >= 0");
        if constexpr (std::is_same_v<T, HermiteGaussian>) {
          require(b.width > 0.0 && std::isfinite(b.width), "beam width must be > 0");
          require(b.m >= 0 && b.n >= 0, "Hermite-Gaussian indices must be >= 0");
        } else if constexpr (std::is_same_v<T, SuperGaussian>) {
          require(b.width > 0.0 && std::isfinite(b.width), "beam width must be > 0");
          require(b.order >= 1, "super-Gaussian order must be >= 1");
        } else if constexpr (std::is_same_v<T, ImageBeam>) {
          require(b.blur_sigma >= 0.0 && std::isfinite(b.blur_sigma), "image blur must be >= 0");
          require(!b.extent || (*b.extent > 0.0 && std::isfinite(*b.extent)),
                  "image extent must be > 0");
        }
      },
      spec);
}

double amplitude_of(const BeamSpec& spec) {
  return std::visit([](const auto& b) { return b.amplitude; }, spec);
}

ComplexField synth_hermite_gaussian(const TransverseGrid& grid, int m, int n, double width,
                                    double amplitude) {
  const HermiteGaussian b{m, n, width, amplitude};
  validate(b);
  return fill(grid, [&](double x, double y) { return hermite_gaussian_value(b, x, y); });
}

ComplexField synth_super_gaussian(const TransverseGrid& grid, double width, int order,
                                  double amplitude) {
  const SuperGaussian b{width, order, amplitude};
  validate(b);
  return fill(grid, [&](double x, double y) { return super_gaussian_value(b, x, y); });
}

ComplexField synth_plane_wave(const TransverseGrid& grid, double amplitude) {
  validate(PlaneWave{amplitude});
  return fill(grid, [&](double, double) { return amplitude; });
}

ComplexField gaussian_blur(const ComplexField& field, double sigma) {
  require(sigma >= 0.0 && std::isfinite(sigma), "blur sigma must be >= 0");
  if (sigma == 0.0) return field;
  const auto& grid = field.grid;

  auto kernel = [sigma](double step) {
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma / step));
    std::vector<double> w(2 * radius + 1);
    double sum = 0.0;
    for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
      const double t = static_cast<double>(k) * step / sigma;
      w[k + radius] = std::exp(-0.5 * t * t);
      sum += w[k + radius];
    }
    for (auto& v : w) v /= sum;
    return w;
  };
  const auto wx = kernel(grid.dx);
  const auto wy = kernel(grid.dy);
  const auto rx = static_cast<std::ptrdiff_t>(wx.size() / 2);
  const auto ry = static_cast<std::ptrdiff_t>(wy.size() / 2);
  const auto nx = static_cast<std::ptrdiff_t>(grid.nx);
  const auto ny = static_cast<std::ptrdiff_t>(grid.ny);

  ComplexField tmp(grid);
  for (std::ptrdiff_t j = 0; j < ny; ++j)
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
      std::complex<double> acc = 0.0;
      for (std::ptrdiff_t k = std::max(-rx, -i); k <= std::min(rx, nx - 1 - i); ++k)
        acc += wx[k + rx] * field.values[j * nx + i + k];
      tmp.values[j * nx + i] = acc;
    }
  ComplexField out(grid);
  for (std::ptrdiff_t j = 0; j < ny; ++j)
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
      std::complex<double> acc = 0.0;
      for (std::ptrdiff_t k = std::max(-ry, -j); k <= std::min(ry, ny - 1 - j); ++k)
        acc += wy[k + ry] * tmp.values[(j + k) * nx + i];
      out.values[j * nx + i] = acc;
    }
  return out;
}

ComplexField synth_from_image(const TransverseGrid& grid, const GrayImage& image, double amplitude,
                              double blur_sigma, std::optional<double> extent) {
  grid.validate();
  validate(ImageBeam{{}, amplitude, blur_sigma, extent});
  if (image.width == 0 || image.height == 0 || image.pixels.size() != image.width * image.height)
    throw Error(Errc::invalid_argument, "image is empty");
  const auto peak = *std::max_element(image.pixels.begin(), image.pixels.end());
  if (peak == 0) throw Error(Errc::invalid_argument, "zero-maximum image cannot be normalised");

  const double width = extent.value_or(0.5 * grid.extent_x());
  const double pitch = width / static_cast<double>(image.width);
  const double height = pitch * static_cast<double>(image.height);
  const double scale = amplitude / static_cast<double>(peak);
  const double last_col = static_cast<double>(image.width - 1);
  const double last_row = static_cast<double>(image.height - 1);

  ComplexField field(grid);
  for (std::size_t j = 0; j < grid.ny; ++j) {
    const double y = grid.y(j);
    if (y < -0.5 * height || y > 0.5 * height) continue;
    const double v = std::clamp((0.5 * height - y) / pitch - 0.5, 0.0, last_row);
    const auto r0 = static_cast<std::size_t>(v);
    const auto r1 = std::min(r0 + 1, image.height - 1);
    const double fv = v - static_cast<double>(r0);
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i);
      if (x < -0.5 * width || x > 0.5 * width) continue;
      const double u = std::clamp((x + 0.5 * width) / pitch - 0.5, 0.0, last_col);
      const auto c0 = static_cast<std::size_t>(u);
      const auto c1 = std::min(c0 + 1, image.width - 1);
      const double fu = u - static_cast<double>(c0);
      const double top = (1.0 - fu) * image.at(c0, r0) + fu * image.at(c1, r0);
      const double bottom = (1.0 - fu) * image.at(c0, r1) + fu * image.at(c1, r1);
      field.at(i, j) = scale * ((1.0 - fv) * top + fv * bottom);
    }
  }
  return gaussian_blur(field, blur_sigma);
}

ComplexField synthesize(const TransverseGrid& grid, const BeamSpec& spec) {
  return std::visit(
      [&](const auto& b) -> ComplexField {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, HermiteGaussian>)
          return synth_hermite_gaussian(grid, b.m, b.n, b.width, b.amplitude);
        else if constexpr (std::is_same_v<T, SuperGaussian>)
          return synth_super_gaussian(grid, b.width, b.order, b.amplitude);
        else if constexpr (std::is_same_v<T, PlaneWave>)
          return synth_plane_wave(grid, b.amplitude);
        else
          return synth_from_image(grid, read_pgm(b.source), b.amplitude, b.blur_sigma, b.extent);
      },
      spec);
}

std::optional<std::complex<double>> sample_analytic(const BeamSpec& spec, double x, double y) {
  return std::visit(
      [&](const auto& b) -> std::optional<std::complex<double>> {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, HermiteGaussian>)
          return hermite_gaussian_value(b, x, y);
        else if constexpr (std::is_same_v<T, SuperGaussian>)
          return super_gaussian_value(b, x, y);
        else if constexpr (std::is_same_v<T, PlaneWave>)
          return b.amplitude;
        else
          return std::nullopt;
      },
      spec);
}

}  // namespace cptclone
