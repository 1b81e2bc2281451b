#include "cptclone/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include "cptclone/analysis.hpp"
#include "cptclone/beams.hpp"
#include "cptclone/error.hpp"
#include "cptclone/field_io.hpp"
#include "cptclone/image.hpp"
#include "cptclone/medium.hpp"

namespace cptclone {

namespace fs = std::filesystem;

namespace {

std::string num(double v) { return std::isnan(v) ? "nan" : format_double(v); }

std::string snapshot_stem(std::size_t index, const char* field) {
  std::string digits = std::to_string(index);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "snap_" + digits + "_" + field;
}

// Samples a beam along the scan line; analytic profiles are evaluated exactly,
// rasters are read from the nearest grid line.
std::vector<complex> scan_line(const RunConfig& c, const TransverseGrid& grid, const BeamSpec& spec) {
  const bool along_x = c.scan.axis == 'x';
  const std::size_t n = along_x ? grid.nx : grid.ny;
  std::vector<complex> out(n);
  if (!std::holds_alternative<ImageBeam>(spec)) {
    for (std::size_t k = 0; k < n; ++k) {
      const double s = along_x ? grid.x(k) : grid.y(k);
      out[k] = *sample_analytic(spec, along_x ? s : c.scan.fixed, along_x ? c.scan.fixed : s);
    }
    return out;
  }
  const auto field = synthesize(grid, spec);
  const double step = along_x ? grid.dy : grid.dx;
  const std::size_t count = along_x ? grid.ny : grid.nx;
  const double t = std::round(c.scan.fixed / step) + static_cast<double>(count / 2);
  const auto line = static_cast<std::size_t>(std::clamp(t, 0.0, static_cast<double>(count - 1)));
  for (std::size_t k = 0; k < n; ++k) out[k] = along_x ? field.at(k, line) : field.at(line, k);
  return out;
}

GrayImage render(const ComplexField& f, double& peak) {
  const auto& g = f.grid;
  peak = 0.0;
  for (const auto& v : f.values) peak = std::max(peak, std::norm(v));
  GrayImage img{g.nx, g.ny, 65535, std::vector<std::uint16_t>(g.size())};
  if (peak > 0.0)
    for (std::size_t r = 0; r < g.ny; ++r)
      for (std::size_t i = 0; i < g.nx; ++i) {
        const double v = std::norm(f.at(i, g.ny - 1 - r)) / peak;
        img.pixels[r * g.nx + i] = static_cast<std::uint16_t>(std::lround(65535.0 * v));
      }
  return img;
}

void metrics_row(std::ostringstream& out, const SnapshotFields& s, const char* name, const ComplexField& f,
                 double power_in, const ComplexField& control_in) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  BeamMetrics m{nan, nan, nan, nan, 0.0, f.power(), nan, nan, -1};
  try {
    m = beam_metrics(f);
  } catch (const Error& e) {
    if (e.code() != Errc::not_localized && e.code() != Errc::zero_power) throw;
    for (const auto& v : f.values) m.peak_intensity = std::max(m.peak_intensity, std::norm(v));
  }
  double fidelity = nan;
  try {
    fidelity = cloning_fidelity(f, control_in);
  } catch (const Error& e) {
    if (e.code() != Errc::zero_power) throw;
  }
  const double t = power_in > 0.0 ? m.total_power / power_in : nan;
  out << s.index << ',' << num(s.z) << ',' << name << ',' << num(m.fwhm_x) << ',' << num(m.fwhm_y) << ','
      << num(m.w2m_x) << ',' << num(m.w2m_y) << ',' << num(m.peak_intensity) << ',' << num(m.total_power)
      << ',' << num(t) << ',' << num(fidelity) << ',';
  if (m.lobe_count >= 0) out << m.lobe_count;
  else out << "nan";
  out << '\n';
}

// Files created by a run, removed again unless the run completes.
class OutputTransaction {
 public:
  explicit OutputTransaction(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    created_dir_ = !fs::exists(dir_, ec);
    fs::create_directories(dir_, ec);
    if (ec) throw Error(Errc::io, "cannot create '" + dir_.string() + "': " + ec.message());
  }
  OutputTransaction(const OutputTransaction&) = delete;
  OutputTransaction& operator=(const OutputTransaction&) = delete;
  ~OutputTransaction() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    if (created_dir_) fs::remove_all(dir_, ec);
  }

  fs::path add(const std::string& name) {
    files_.push_back(dir_ / name);
    return files_.back();
  }
  void text(const std::string& name, const std::string& content) {
    const auto path = add(name);
    write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(content.data()), content.size()));
  }
  std::vector<fs::path> commit() {
    committed_ = true;
    return files_;
  }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool created_dir_ = false;
  bool committed_ = false;
};

}  // namespace

fs::path resolve_output_dir(const std::optional<fs::path>& flag, const RunConfig& config) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return fs::path(env);
  return config.output_dir;
}

std::string chi_scan_csv(const RunConfig& c) {
  const auto grid = c.grid.grid();
  const auto g = scan_line(c, grid, c.probe);
  const auto G = scan_line(c, grid, c.control);
  std::ostringstream out;
  out << "coordinate_cm,re_c31,im_c31,re_c32,im_c32,abs_g,abs_G\n";
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s = c.scan.axis == 'x' ? grid.x(k) : grid.y(k);
    const auto chi = susceptibility(c.medium, {g[k], G[k]});
    out << num(s) << ',' << num(chi.c31.real()) << ',' << num(chi.c31.imag()) << ',' << num(chi.c32.real())
        << ',' << num(chi.c32.imag()) << ',' << num(std::abs(g[k])) << ',' << num(std::abs(G[k])) << '\n';
  }
  return out.str();
}

fs::path run_chi_scan(const RunConfig& config, const fs::path& out_dir) {
  const auto csv = chi_scan_csv(config);
  OutputTransaction tx(out_dir);
  tx.text("chi_scan.csv", csv);
  return tx.commit().front();
}

std::string metrics_csv(const std::vector<SnapshotFields>& snapshots) {
  if (snapshots.empty() || snapshots.front().index != 0)
    throw Error(Errc::invalid_argument, "metrics need the entrance-plane snapshot");
  const auto& in = snapshots.front();
  const double probe_in = in.probe.power();
  const double control_in = in.control.power();
  std::ostringstream out;
  out << "snapshot,z_cm,field,fwhm_x_cm,fwhm_y_cm,w2m_x_cm,w2m_y_cm,peak_intensity,power,transmission,"
         "fidelity_vs_control_in,lobes\n";
  for (const auto& s : snapshots) {
    metrics_row(out, s, "probe", s.probe, probe_in, in.control);
    metrics_row(out, s, "control", s.control, control_in, in.control);
  }
  return out.str();
}

RunSummary run_propagation(const RunConfig& config, const fs::path& out_dir, const StepObserver& observer) {
  const auto grid = config.grid.grid();
  FieldState state0{synthesize(grid, config.probe), synthesize(grid, config.control), 0.0};
  const auto result =
      propagate(state0, config.medium, config.step, config.z_end, config.snapshot_plan(), observer);

  RunSummary summary;
  summary.steps = result.steps;
  std::optional<std::size_t> last_step;
  for (const auto& snap : result.snapshots) {
    if (last_step == snap.step_index) continue;
    last_step = snap.step_index;
    summary.snapshots.push_back({summary.snapshots.size(), snap.state.z, snap.state.probe, snap.state.control});
  }
  const auto csv = metrics_csv(summary.snapshots);

  OutputTransaction tx(out_dir);
  for (const auto& s : summary.snapshots) {
    for (auto [name, field, id] : {std::tuple{"probe", &s.probe, FieldId::probe},
                                   std::tuple{"control", &s.control, FieldId::control}}) {
      const auto stem = snapshot_stem(s.index, name);
      write_field(tx.add(stem + ".cptf"), {*field, s.z, id});
      double peak = 0.0;
      write_pgm(tx.add(stem + ".pgm"), render(*field, peak));
      tx.text(stem + ".pgm.txt", "peak_intensity = " + num(peak) + "\nz_cm = " + num(s.z) + "\n");
    }
  }
  tx.text("metrics.csv", csv);
  tx.text("config.echo.ini", echo_config(config));
  summary.files = tx.commit();
  return summary;
}

std::vector<SnapshotFields> load_run(const fs::path& run_dir) {
  std::vector<SnapshotFields> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(run_dir, ec)) {
    const auto name = entry.path().filename().string();
    const std::string prefix = "snap_", suffix = "_probe.cptf";
    if (name.size() <= prefix.size() + suffix.size() || !name.starts_with(prefix) || !name.ends_with(suffix))
      continue;
    const auto digits = name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
    if (!std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) continue;
    const auto index = static_cast<std::size_t>(std::stoull(digits));
    auto probe = read_field(entry.path());
    auto control = read_field(run_dir / (snapshot_stem(index, "control") + ".cptf"));
    if (probe.id != FieldId::probe || control.id != FieldId::control)
      throw Error(Errc::format, "field id does not match file name in snapshot " + std::to_string(index));
    if (probe.z != control.z || !(probe.field.grid == control.field.grid))
      throw Error(Errc::format, "probe and control disagree in snapshot " + std::to_string(index));
    out.push_back({index, probe.z, std::move(probe.field), std::move(control.field)});
  }
  if (ec) throw Error(Errc::io, "cannot list '" + run_dir.string() + "': " + ec.message());
  if (out.empty()) throw Error(Errc::io, "no snapshot files in '" + run_dir.string() + "'");
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  return out;
}

std::string analyze_run(const fs::path& run_dir) { return metrics_csv(load_run(run_dir)); }

std::string noise_fidelity_csv(const SnapshotFields& exit_plane, const ComplexField& control_in,
                               std::uint64_t seed, double noise_fraction) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::ostringstream out;
  out << "snapshot,z_cm,field,seed,noise_fraction,fidelity_vs_clean,fidelity_vs_control_in\n";
  for (auto [name, field] : {std::pair{"probe", &exit_plane.probe}, std::pair{"control", &exit_plane.control}}) {
    double peak = 0.0;
    for (const auto& v : field->values) peak = std::max(peak, std::abs(v));
    ComplexField noisy = *field;
    const double sigma = noise_fraction * peak / std::sqrt(2.0);
    for (auto& v : noisy.values) v += complex(sigma * normal(rng), sigma * normal(rng));
    double self = std::numeric_limits<double>::quiet_NaN(), vs_in = self;
    try {
      self = cloning_fidelity(noisy, *field);
      vs_in = cloning_fidelity(noisy, control_in);
    } catch (const Error& e) {
      if (e.code() != Errc::zero_power) throw;
    }
    out << exit_plane.index << ',' << num(exit_plane.z) << ',' << name << ',' << seed << ',' << num(noise_fraction)
        << ',' << num(self) << ',' << num(vs_in) << '\n';
  }
  return out.str();
}

}  // namespace cptclone
