#include "cptclone/cptclone.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "cptclone/analysis.hpp"
#include "cptclone/commands.hpp"
#include "cptclone/config.hpp"
#include "cptclone/error.hpp"
#include "cptclone/field_io.hpp"
#include "cptclone/medium.hpp"

struct cpt_config {
  cptclone::RunConfig value;
};

struct cpt_field {
  cptclone::FieldRecord record;
};

namespace {

using namespace cptclone;

struct LastError {
  std::string message;
  std::size_t line = 0;
  std::int64_t offset = -1;
};

thread_local LastError last_error;

struct Cancelled {};

cpt_status fail(cpt_status status, std::string message) {
  last_error = {std::move(message), 0, -1};
  return status;
}

cpt_status map(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return CPT_E_INVALID_ARGUMENT;
    case Errc::no_field: return CPT_E_NO_FIELD;
    case Errc::non_unique_steady_state: return CPT_E_NON_UNIQUE_STEADY_STATE;
    case Errc::non_finite: return CPT_E_NON_FINITE;
    case Errc::parse: return CPT_E_PARSE;
    case Errc::io: return CPT_E_IO;
    case Errc::format: return CPT_E_FORMAT;
    case Errc::not_localized: return CPT_E_NOT_LOCALIZED;
    case Errc::zero_power: return CPT_E_ZERO_POWER;
  }
  return CPT_E_INTERNAL;
}

template <typename F>
cpt_status guarded(F&& body) noexcept {
  try {
    body();
    return CPT_OK;
  } catch (const ParseError& e) {
    const auto status = fail(CPT_E_PARSE, e.what());
    last_error.line = e.line();
    return status;
  } catch (const FormatError& e) {
    const auto status = fail(CPT_E_FORMAT, e.what());
    last_error.offset = static_cast<std::int64_t>(e.offset());
    return status;
  } catch (const Error& e) {
    return fail(map(e.code()), e.what());
  } catch (const Cancelled&) {
    return fail(CPT_E_CANCELLED, "cancelled by progress callback");
  } catch (const std::bad_alloc&) {
    return fail(CPT_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CPT_E_INTERNAL, e.what());
  } catch (...) {
    return fail(CPT_E_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(Errc::invalid_argument, what);
}

char* duplicate(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::optional<std::filesystem::path> optional_path(const char* p) {
  if (!p) return std::nullopt;
  return std::filesystem::path(p);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void fill(cpt_beam_metrics* out, const BeamMetrics& m) {
  *out = {m.fwhm_x, m.fwhm_y, m.w2m_x, m.w2m_y, m.peak_intensity, m.total_power, m.centroid_x, m.centroid_y,
          m.lobe_count};
}

}  // namespace

extern "C" {

const char* cpt_version(void) { return "1.0.0"; }

const char* cpt_status_string(cpt_status status) {
  switch (status) {
    case CPT_OK: return "ok";
    case CPT_E_INVALID_ARGUMENT: return to_string(Errc::invalid_argument);
    case CPT_E_NO_FIELD: return to_string(Errc::no_field);
    case CPT_E_NON_UNIQUE_STEADY_STATE: return to_string(Errc::non_unique_steady_state);
    case CPT_E_NON_FINITE: return to_string(Errc::non_finite);
    case CPT_E_PARSE: return to_string(Errc::parse);
    case CPT_E_IO: return to_string(Errc::io);
    case CPT_E_FORMAT: return to_string(Errc::format);
    case CPT_E_NOT_LOCALIZED: return to_string(Errc::not_localized);
    case CPT_E_ZERO_POWER: return to_string(Errc::zero_power);
    case CPT_E_CANCELLED: return "cancelled";
    case CPT_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* cpt_last_error(void) { return last_error.message.c_str(); }
size_t cpt_last_error_line(void) { return last_error.line; }
int64_t cpt_last_error_offset(void) { return last_error.offset; }
void cpt_string_free(char* s) { std::free(s); }

cpt_status cpt_config_load(const char* path, cpt_config** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new cpt_config{load_config(path)};
  });
}

cpt_status cpt_config_parse(const char* text, const char* base_dir, cpt_config** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new cpt_config{parse_config(text, base_dir ? std::filesystem::path(base_dir) : std::filesystem::path())};
  });
}

void cpt_config_free(cpt_config* config) { delete config; }

cpt_status cpt_config_echo(const cpt_config* config, char** out) {
  return guarded([&] {
    require(config && out, "null argument");
    *out = duplicate(echo_config(config->value));
  });
}

cpt_status cpt_config_get_scan(const cpt_config* config, char* axis, double* fixed) {
  return guarded([&] {
    require(config && axis && fixed, "null argument");
    *axis = config->value.scan.axis;
    *fixed = config->value.scan.fixed;
  });
}

cpt_status cpt_config_set_scan(cpt_config* config, char axis, double fixed) {
  return guarded([&] {
    require(config, "null config");
    require(axis == 'x' || axis == 'y', "axis must be 'x' or 'y'");
    require(std::isfinite(fixed), "fixed coordinate must be finite");
    config->value.scan = {axis, fixed};
  });
}

cpt_status cpt_config_set_snapshot_every(cpt_config* config, double interval_cm) {
  return guarded([&] {
    require(config, "null config");
    require(interval_cm > 0.0 && std::isfinite(interval_cm), "snapshot interval must be > 0");
    config->value.snapshot_every = interval_cm;
  });
}

cpt_status cpt_config_set_scheme(cpt_config* config, const char* scheme) {
  return guarded([&] {
    require(config && scheme, "null argument");
    const std::string s(scheme);
    if (s == "strang2") config->value.step.scheme = Scheme::strang2;
    else if (s == "yoshida4") config->value.step.scheme = Scheme::yoshida4;
    else throw Error(Errc::invalid_argument, "scheme must be strang2 or yoshida4");
  });
}

cpt_status cpt_resolve_output_dir(const cpt_config* config, const char* out_dir, char** out) {
  return guarded([&] {
    require(config && out, "null argument");
    *out = duplicate(resolve_output_dir(optional_path(out_dir), config->value).string());
  });
}

cpt_status cpt_chi_scan(const cpt_config* config, const char* out_dir, char** csv_path) {
  return guarded([&] {
    require(config, "null config");
    const auto dir = resolve_output_dir(optional_path(out_dir), config->value);
    const auto path = run_chi_scan(config->value, dir);
    if (csv_path) *csv_path = duplicate(path.string());
  });
}

cpt_status cpt_propagate(const cpt_config* config, const char* out_dir, cpt_progress_fn progress, void* user) {
  return guarded([&] {
    require(config, "null config");
    const auto dir = resolve_output_dir(optional_path(out_dir), config->value);
    StepObserver observer;
    if (progress)
      observer = [&](const FieldState& s, std::size_t done, std::size_t total) {
        if (progress(done, total, s.z, user) != 0) throw Cancelled{};
      };
    run_propagation(config->value, dir, observer);
  });
}

cpt_status cpt_analyze(const char* run_dir, const char* out_dir, int has_seed, uint64_t seed) {
  return guarded([&] {
    require(run_dir, "null run directory");
    std::filesystem::path dir = run_dir;
    if (out_dir) dir = out_dir;
    else if (const char* env = std::getenv(kOutputDirEnv); env && *env) dir = env;
    const auto snapshots = load_run(run_dir);
    const auto csv = metrics_csv(snapshots);
    std::string noise;
    if (has_seed) noise = noise_fidelity_csv(snapshots.back(), snapshots.front().control, seed);
    std::filesystem::create_directories(dir);
    write_text(dir / "analysis.csv", csv);
    if (has_seed) write_text(dir / "noise.csv", noise);
  });
}

cpt_status cpt_field_read(const char* path, cpt_field** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new cpt_field{read_field(path)};
  });
}

cpt_status cpt_field_write(const cpt_field* field, const char* path) {
  return guarded([&] {
    require(field && path, "null argument");
    write_field(path, field->record);
  });
}

cpt_status cpt_field_create(const cpt_field_info* info, const double* interleaved, cpt_field** out) {
  return guarded([&] {
    require(info && interleaved && out, "null argument");
    require(info->id == 1 || info->id == 2, "field id must be 1 or 2");
    TransverseGrid grid{static_cast<std::size_t>(info->nx), static_cast<std::size_t>(info->ny), info->dx_cm,
                        info->dy_cm};
    grid.validate();
    FieldRecord r{ComplexField(grid), info->z_cm, static_cast<FieldId>(info->id)};
    std::memcpy(static_cast<void*>(r.field.values.data()), interleaved, grid.size() * 2 * sizeof(double));
    *out = new cpt_field{std::move(r)};
  });
}

void cpt_field_free(cpt_field* field) { delete field; }

cpt_status cpt_field_get_info(const cpt_field* field, cpt_field_info* info) {
  return guarded([&] {
    require(field && info, "null argument");
    const auto& g = field->record.field.grid;
    *info = {g.nx, g.ny, g.dx, g.dy, field->record.z, static_cast<int>(field->record.id)};
  });
}

cpt_status cpt_field_data(const cpt_field* field, const double** interleaved) {
  return guarded([&] {
    require(field && interleaved, "null argument");
    *interleaved = reinterpret_cast<const double*>(field->record.field.values.data());
  });
}

cpt_status cpt_beam_metrics_compute(const cpt_field* field, cpt_beam_metrics* out) {
  return guarded([&] {
    require(field && out, "null argument");
    fill(out, beam_metrics(field->record.field));
  });
}

cpt_status cpt_cloning_fidelity(const cpt_field* a, const cpt_field* b, double* out) {
  return guarded([&] {
    require(a && b && out, "null argument");
    *out = cloning_fidelity(a->record.field, b->record.field);
  });
}

cpt_status cpt_feature_size_ratio(const cpt_field* a, const cpt_field* b, double* out) {
  return guarded([&] {
    require(a && b && out, "null argument");
    *out = feature_size_ratio(a->record.field, b->record.field);
  });
}

cpt_status cpt_transmission(const cpt_field* in, const cpt_field* out_field, double* out) {
  return guarded([&] {
    require(in && out_field && out, "null argument");
    *out = transmission(in->record.field, out_field->record.field);
  });
}

void cpt_medium_defaults(cpt_medium* medium) {
  if (!medium) return;
  const MediumParams p;
  *medium = {p.gamma, p.big_gamma, p.delta1, p.delta2, p.density, p.lambda1, p.lambda2, -1.0, -1.0};
}

cpt_status cpt_susceptibility(const cpt_medium* medium, double g_re, double g_im, double G_re, double G_im,
                              double chi[4]) {
  return guarded([&] {
    require(medium && chi, "null argument");
    MediumParams p;
    p.gamma = medium->gamma;
    p.big_gamma = medium->big_gamma;
    p.delta1 = medium->delta1;
    p.delta2 = medium->delta2;
    p.density = medium->density;
    p.lambda1 = medium->lambda1_cm;
    p.lambda2 = medium->lambda2_cm;
    if (medium->kappa1 >= 0.0) p.kappa1_override = medium->kappa1;
    if (medium->kappa2 >= 0.0) p.kappa2_override = medium->kappa2;
    p.validate();
    const auto s = susceptibility(p, {{g_re, g_im}, {G_re, G_im}});
    chi[0] = s.c31.real();
    chi[1] = s.c31.imag();
    chi[2] = s.c32.real();
    chi[3] = s.c32.imag();
    if (s.no_field) throw Error(Errc::no_field, "no light at this point; coherences are zero");
  });
}

cpt_status cpt_rayleigh_length(double w0_cm, double lambda_cm, double* out) {
  return guarded([&] {
    require(out, "null argument");
    *out = rayleigh_length(w0_cm, lambda_cm);
  });
}

}  // extern "C"
