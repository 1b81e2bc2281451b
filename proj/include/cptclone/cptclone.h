/* C interface to the cptclone simulator.
 *
 * Every call returns a cpt_status; on failure a thread-local description is
 * available from cpt_last_error() until the next failing call on the same
 * thread. Objects are opaque and released with the matching *_free call.
 * Strings returned through char** are released with cpt_string_free.
 */
#ifndef CPTCLONE_H
#define CPTCLONE_H

#include <stddef.h>
#include <stdint.h>

#if defined(CPT_BUILDING_LIBRARY)
#define CPT_API __attribute__((visibility("default")))
#else
#define CPT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cpt_status {
  CPT_OK = 0,
  CPT_E_INVALID_ARGUMENT = 1,
  CPT_E_NO_FIELD = 2,
  CPT_E_NON_UNIQUE_STEADY_STATE = 3,
  CPT_E_NON_FINITE = 4,
  CPT_E_PARSE = 5,
  CPT_E_IO = 6,
  CPT_E_FORMAT = 7,
  CPT_E_NOT_LOCALIZED = 8,
  CPT_E_ZERO_POWER = 9,
  CPT_E_CANCELLED = 10,
  CPT_E_INTERNAL = 99
} cpt_status;

CPT_API const char* cpt_version(void);
CPT_API const char* cpt_status_string(cpt_status status);
CPT_API const char* cpt_last_error(void);
/* Config line of the last parse error, or 0. */
CPT_API size_t cpt_last_error_line(void);
/* Byte offset of the last file-format error, or -1. */
CPT_API int64_t cpt_last_error_offset(void);
CPT_API void cpt_string_free(char* s);

/* ---- configuration ---- */

typedef struct cpt_config cpt_config;

CPT_API cpt_status cpt_config_load(const char* path, cpt_config** out);
/* base_dir may be NULL; relative image paths are then taken from the cwd. */
CPT_API cpt_status cpt_config_parse(const char* text, const char* base_dir, cpt_config** out);
CPT_API void cpt_config_free(cpt_config* config);
CPT_API cpt_status cpt_config_echo(const cpt_config* config, char** out);

/* axis is 'x' or 'y'; fixed is the coordinate on the other axis [cm]. */
CPT_API cpt_status cpt_config_get_scan(const cpt_config* config, char* axis, double* fixed);
CPT_API cpt_status cpt_config_set_scan(cpt_config* config, char axis, double fixed);
CPT_API cpt_status cpt_config_set_snapshot_every(cpt_config* config, double interval_cm);
/* "strang2" or "yoshida4". */
CPT_API cpt_status cpt_config_set_scheme(cpt_config* config, const char* scheme);

/* out_dir may be NULL: the CPTCLONE_OUTPUT_DIR environment variable is used
 * if set, otherwise the directory named in the config. */
CPT_API cpt_status cpt_resolve_output_dir(const cpt_config* config, const char* out_dir, char** out);

/* ---- commands ---- */

CPT_API cpt_status cpt_chi_scan(const cpt_config* config, const char* out_dir, char** csv_path);

/* Called after every step. A non-zero return aborts the run. */
typedef int (*cpt_progress_fn)(size_t steps_done, size_t steps_total, double z_cm, void* user);

CPT_API cpt_status cpt_propagate(const cpt_config* config, const char* out_dir, cpt_progress_fn progress,
                                 void* user);

/* Writes analysis.csv (and noise.csv when has_seed) into out_dir, or into
 * CPTCLONE_OUTPUT_DIR / run_dir when out_dir is NULL. */
CPT_API cpt_status cpt_analyze(const char* run_dir, const char* out_dir, int has_seed, uint64_t seed);

/* ---- fields ---- */

typedef struct cpt_field cpt_field;

typedef struct cpt_field_info {
  uint64_t nx;
  uint64_t ny;
  double dx_cm;
  double dy_cm;
  double z_cm;
  int id; /* 1 = probe, 2 = control */
} cpt_field_info;

typedef struct cpt_beam_metrics {
  double fwhm_x_cm;
  double fwhm_y_cm;
  double w2m_x_cm;
  double w2m_y_cm;
  double peak_intensity;
  double total_power;
  double centroid_x_cm;
  double centroid_y_cm;
  int lobe_count;
} cpt_beam_metrics;

CPT_API cpt_status cpt_field_read(const char* path, cpt_field** out);
CPT_API cpt_status cpt_field_write(const cpt_field* field, const char* path);
/* interleaved holds nx*ny (re, im) pairs, row-major. */
CPT_API cpt_status cpt_field_create(const cpt_field_info* info, const double* interleaved, cpt_field** out);
CPT_API void cpt_field_free(cpt_field* field);
CPT_API cpt_status cpt_field_get_info(const cpt_field* field, cpt_field_info* info);
/* Borrowed pointer to the interleaved samples, valid until cpt_field_free. */
CPT_API cpt_status cpt_field_data(const cpt_field* field, const double** interleaved);

CPT_API cpt_status cpt_beam_metrics_compute(const cpt_field* field, cpt_beam_metrics* out);
CPT_API cpt_status cpt_cloning_fidelity(const cpt_field* a, const cpt_field* b, double* out);
CPT_API cpt_status cpt_feature_size_ratio(const cpt_field* a, const cpt_field* b, double* out);
CPT_API cpt_status cpt_transmission(const cpt_field* in, const cpt_field* out_field, double* out);

/* ---- medium ---- */

typedef struct cpt_medium {
  double gamma;
  double big_gamma;
  double delta1;
  double delta2;
  double density;    /* atoms / cm^3 */
  double lambda1_cm;
  double lambda2_cm;
  double kappa1;     /* 1/cm; negative = derived from density and wavelength */
  double kappa2;
} cpt_medium;

/* gamma = 1, Rb D1 wavelengths, no atoms, derived couplings. */
CPT_API void cpt_medium_defaults(cpt_medium* medium);

/* chi receives (Re c31, Im c31, Re c32, Im c32) in 1/cm. With g = G = 0 it
   is zeroed and CPT_E_NO_FIELD is returned. */
CPT_API cpt_status cpt_susceptibility(const cpt_medium* medium, double g_re, double g_im, double G_re,
                                      double G_im, double chi[4]);

CPT_API cpt_status cpt_rayleigh_length(double w0_cm, double lambda_cm, double* out);

#ifdef __cplusplus
}
#endif

#endif /* CPTCLONE_H */
