#include "cptclone/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cptclone/error.hpp"
#include "cptclone/spectral.hpp"

namespace cptclone {

namespace {

double half_max_width(std::span<const double> p, std::size_t peak, double step) {
  const double half = 0.5 * p[peak];
  std::ptrdiff_t k = static_cast<std::ptrdiff_t>(peak);
  while (k >= 0 && p[k] >= half) --k;
  if (k < 0) return 0.0;
  const double left = static_cast<double>(k) + (half - p[k]) / (p[k + 1] - p[k]);
  std::size_t m = peak;
  while (m < p.size() && p[m] >= half) ++m;
  if (m == p.size()) return 0.0;
  const double right = static_cast<double>(m) - (half - p[m]) / (p[m - 1] - p[m]);
  return (right - left) * step;
}

struct Line {
  std::vector<double> values;
  double origin = 0.0;
  double step = 0.0;
};

Line row(const ComplexField& f, std::size_t j) {
  Line line{std::vector<double>(f.grid.nx), f.grid.x(0), f.grid.dx};
  for (std::size_t i = 0; i < f.grid.nx; ++i) line.values[i] = std::norm(f.at(i, j));
  return line;
}

Line column(const ComplexField& f, std::size_t i) {
  Line line{std::vector<double>(f.grid.ny), f.grid.y(0), f.grid.dy};
  for (std::size_t j = 0; j < f.grid.ny; ++j) line.values[j] = std::norm(f.at(i, j));
  return line;
}

struct Moments {
  double sum = 0.0;
  double cx = 0.0, cy = 0.0;
  double vx = 0.0, vy = 0.0;
  double peak = 0.0;
  std::size_t peak_i = 0, peak_j = 0;
};

Moments moments(const ComplexField& f) {
  Moments m;
  double sx = 0, sy = 0, sxx = 0, syy = 0;
  for (std::size_t j = 0; j < f.grid.ny; ++j) {
    const double y = f.grid.y(j);
    for (std::size_t i = 0; i < f.grid.nx; ++i) {
      const double v = std::norm(f.at(i, j));
      const double x = f.grid.x(i);
      m.sum += v;
      sx += v * x;
      sy += v * y;
      sxx += v * x * x;
      syy += v * y * y;
      if (v > m.peak) {
        m.peak = v;
        m.peak_i = i;
        m.peak_j = j;
      }
    }
  }
  if (!(m.sum > 0.0)) throw Error(Errc::zero_power, "field carries no power");
  m.cx = sx / m.sum;
  m.cy = sy / m.sum;
  m.vx = std::max(0.0, sxx / m.sum - m.cx * m.cx);
  m.vy = std::max(0.0, syy / m.sum - m.cy * m.cy);
  return m;
}

std::size_t nearest_index(double coord, std::size_t n, double step) {
  const double t = std::round(coord / step + static_cast<double>(n / 2));
  return static_cast<std::size_t>(std::clamp(t, 0.0, static_cast<double>(n - 1)));
}

// Row and column used for width measurements: through the centroid unless
// that line is dark relative to the global peak.
std::pair<std::size_t, std::size_t> metric_lines(const ComplexField& f, const Moments& m) {
  std::size_t j = nearest_index(m.cy, f.grid.ny, f.grid.dy);
  std::size_t i = nearest_index(m.cx, f.grid.nx, f.grid.dx);
  const auto r = row(f, j);
  if (*std::max_element(r.values.begin(), r.values.end()) < 0.5 * m.peak) j = m.peak_j;
  const auto c = column(f, i);
  if (*std::max_element(c.values.begin(), c.values.end()) < 0.5 * m.peak) i = m.peak_i;
  return {j, i};
}

double dominant_width(const std::vector<Lobe>& lobes, const char* axis) {
  if (lobes.empty()) throw Error(Errc::not_localized, std::string("no localized beam along ") + axis);
  const auto it = std::max_element(lobes.begin(), lobes.end(),
                                   [](const Lobe& a, const Lobe& b) { return a.peak < b.peak; });
  if (it->fwhm <= 0.0)
    throw Error(Errc::not_localized,
                std::string("no localized beam along ") + axis + " (no half-maximum crossing)");
  return it->fwhm;
}

}  // namespace

std::vector<Lobe> find_lobes(std::span<const double> p, double origin, double step,
                             double min_prominence_fraction) {
  std::vector<Lobe> lobes;
  const std::size_t n = p.size();
  if (n == 0) return lobes;
  const double global = *std::max_element(p.begin(), p.end());
  if (!(global > 0.0)) return lobes;

  for (std::size_t i = 0; i < n;) {
    const bool rises = i == 0 || p[i] > p[i - 1];
    if (!rises) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end + 1 < n && p[end + 1] == p[i]) ++end;
    const bool falls = end + 1 == n || p[end + 1] < p[i];
    if (falls && p[i] > 0.0) {
      double left_base = p[i];
      for (std::ptrdiff_t k = static_cast<std::ptrdiff_t>(i) - 1; k >= 0 && p[k] <= p[i]; --k)
        left_base = std::min(left_base, p[k]);
      double right_base = p[i];
      for (std::size_t k = end + 1; k < n && p[k] <= p[i]; ++k) right_base = std::min(right_base, p[k]);
      const double prominence = p[i] - std::max(left_base, right_base);
      // The global maximum always counts even on a flat profile.
      if (prominence >= min_prominence_fraction * global || p[i] == global) {
        const std::size_t centre = (i + end) / 2;
        Lobe lobe;
        lobe.index = centre;
        lobe.position = origin + static_cast<double>(centre) * step;
        lobe.peak = p[i];
        lobe.prominence = prominence;
        lobe.fwhm = half_max_width(p, centre, step);
        lobes.push_back(lobe);
      }
    }
    i = end + 1;
  }
  return lobes;
}

BeamMetrics beam_metrics(const ComplexField& field) {
  const auto m = moments(field);
  const auto [j, i] = metric_lines(field, m);
  const auto r = row(field, j);
  const auto c = column(field, i);
  const auto row_lobes = find_lobes(r.values, r.origin, r.step);
  const auto col_lobes = find_lobes(c.values, c.origin, c.step);

  BeamMetrics out;
  out.total_power = m.sum * field.grid.cell_area();
  out.peak_intensity = m.peak;
  out.centroid_x = m.cx;
  out.centroid_y = m.cy;
  out.w2m_x = 2.0 * std::sqrt(m.vx);
  out.w2m_y = 2.0 * std::sqrt(m.vy);
  out.fwhm_x = dominant_width(row_lobes, "x");
  out.fwhm_y = dominant_width(col_lobes, "y");
  out.lobe_count = static_cast<int>(std::max(row_lobes.size(), col_lobes.size()));
  return out;
}

double transmission(const ComplexField& in, const ComplexField& out) {
  if (!(in.grid == out.grid)) throw Error(Errc::invalid_argument, "transmission: grid mismatch");
  const double p_in = in.power();
  if (!(p_in > 0.0)) throw Error(Errc::zero_power, "transmission: input carries no power");
  return out.power() / p_in;
}

double transmission(const FieldState& in, const FieldState& out, Which which) {
  return which == Which::probe ? transmission(in.probe, out.probe)
                               : transmission(in.control, out.control);
}

double rayleigh_length(double w0, double lambda) {
  if (!(w0 > 0.0) || !(lambda > 0.0))
    throw Error(Errc::invalid_argument, "rayleigh_length: inputs must be positive");
  return kPi * w0 * w0 / lambda;
}

namespace {

struct Centered {
  std::vector<double> values;
  double norm2 = 0.0;
};

Centered centered_intensity(const ComplexField& f) {
  Centered c{intensity(f), 0.0};
  double mean = 0.0;
  for (double v : c.values) mean += v;
  mean /= static_cast<double>(c.values.size());
  for (double& v : c.values) {
    v -= mean;
    c.norm2 += v * v;
  }
  if (!(c.norm2 > 0.0)) throw Error(Errc::zero_power, "cloning_fidelity: intensity has no variance");
  return c;
}

}  // namespace

double cloning_fidelity_direct(const ComplexField& a, const ComplexField& b, std::size_t max_shift_x,
                               std::size_t max_shift_y) {
  if (!(a.grid == b.grid)) throw Error(Errc::invalid_argument, "cloning_fidelity: grid mismatch");
  const auto ca = centered_intensity(a);
  const auto cb = centered_intensity(b);
  const auto nx = static_cast<std::ptrdiff_t>(a.grid.nx);
  const auto ny = static_cast<std::ptrdiff_t>(a.grid.ny);
  const auto sx = static_cast<std::ptrdiff_t>(max_shift_x);
  const auto sy = static_cast<std::ptrdiff_t>(max_shift_y);
  double best = -std::numeric_limits<double>::infinity();
  for (std::ptrdiff_t dy = -sy; dy <= sy; ++dy)
    for (std::ptrdiff_t dx = -sx; dx <= sx; ++dx) {
      double acc = 0.0;
      for (std::ptrdiff_t j = 0; j < ny; ++j) {
        const std::ptrdiff_t jj = ((j + dy) % ny + ny) % ny;
        for (std::ptrdiff_t i = 0; i < nx; ++i) {
          const std::ptrdiff_t ii = ((i + dx) % nx + nx) % nx;
          acc += ca.values[j * nx + i] * cb.values[jj * nx + ii];
        }
      }
      best = std::max(best, acc);
    }
  return best / std::sqrt(ca.norm2 * cb.norm2);
}

double cloning_fidelity(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid == b.grid)) throw Error(Errc::invalid_argument, "cloning_fidelity: grid mismatch");
  const auto& grid = a.grid;
  const auto ca = centered_intensity(a);
  const auto cb = centered_intensity(b);

  // corr(s) = sum_r A(r) B(r + s) = IDFT(conj(DFT A) * DFT B)(s)
  Fft2d fft(grid);
  auto buf = fft.buffer();
  std::copy(ca.values.begin(), ca.values.end(), buf.begin());
  fft.forward();
  std::vector<std::complex<double>> spec_a(buf.begin(), buf.end());
  std::copy(cb.values.begin(), cb.values.end(), buf.begin());
  fft.forward();
  for (std::size_t n = 0; n < buf.size(); ++n) buf[n] *= std::conj(spec_a[n]);
  fft.inverse();

  const auto nx = static_cast<std::ptrdiff_t>(grid.nx);
  const auto ny = static_cast<std::ptrdiff_t>(grid.ny);
  const auto sx = static_cast<std::ptrdiff_t>(grid.nx / 20);
  const auto sy = static_cast<std::ptrdiff_t>(grid.ny / 20);
  double best = -std::numeric_limits<double>::infinity();
  for (std::ptrdiff_t dy = -sy; dy <= sy; ++dy)
    for (std::ptrdiff_t dx = -sx; dx <= sx; ++dx) {
      const std::ptrdiff_t jj = (dy + ny) % ny;
      const std::ptrdiff_t ii = (dx + nx) % nx;
      best = std::max(best, buf[jj * nx + ii].real());
    }
  return std::clamp(best / (static_cast<double>(grid.size()) * std::sqrt(ca.norm2 * cb.norm2)), -1.0,
                    1.0);
}

double feature_size_ratio(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid == b.grid)) throw Error(Errc::invalid_argument, "feature_size_ratio: grid mismatch");
  const auto ma = moments(a);
  moments(b);  // rejects a dark field
  const auto [j, i] = metric_lines(a, ma);

  double log_sum = 0.0;
  int matched = 0;
  auto match = [&](const Line& la, const Line& lb) {
    const auto lobes_a = find_lobes(la.values, la.origin, la.step);
    const auto lobes_b = find_lobes(lb.values, lb.origin, lb.step);
    for (const auto& pa : lobes_a) {
      if (pa.fwhm <= 0.0) continue;
      const Lobe* best = nullptr;
      for (const auto& pb : lobes_b) {
        if (pb.fwhm <= 0.0) continue;
        if (!best || std::abs(pb.position - pa.position) < std::abs(best->position - pa.position))
          best = &pb;
      }
      if (best && std::abs(best->position - pa.position) <= pa.fwhm) {
        log_sum += std::log(pa.fwhm / best->fwhm);
        ++matched;
      }
    }
  };
  match(row(a, j), row(b, j));
  match(column(a, i), column(b, i));
  if (matched == 0)
    throw Error(Errc::not_localized, "feature_size_ratio: no lobes could be matched");
  return std::exp(log_sum / matched);
}

}  // namespace cptclone
