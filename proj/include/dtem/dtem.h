#ifndef DTEM_H
#define DTEM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define DTEM_API __attribute__((visibility("default")))
#else
#define DTEM_API
#endif

/* Status codes. Every function returning dtem_status leaves a message for
   dtem_last_error() on failure. */
typedef enum dtem_status {
  DTEM_OK = 0,
  DTEM_ERR_DOMAIN = 1,
  DTEM_ERR_INVALID_ARGUMENT = 2,
  DTEM_ERR_MISMATCH = 3,
  DTEM_ERR_IO = 4,
  DTEM_ERR_COVERAGE = 5,
  DTEM_ERR_INTERNAL = 6
} dtem_status;

typedef struct dtem_config dtem_config;
typedef struct dtem_report dtem_report;
typedef void (*dtem_line_fn)(const char* line, void* user);

DTEM_API const char* dtem_version(void);
/* Short machine-readable category ("domain", "io", ...). */
DTEM_API const char* dtem_status_name(dtem_status status);
/* Message of the last failure on the calling thread; "" if none. */
DTEM_API const char* dtem_last_error(void);
/* Routes library warnings to `fn` (NULL restores stderr). */
DTEM_API void dtem_set_warning_callback(dtem_line_fn fn, void* user);

DTEM_API dtem_status dtem_electron_wavelength(double volts, double* lambda);
DTEM_API dtem_status dtem_fresnel_number(double a, double lambda, double thickness, double* number);

/* Run configuration: sectioned "key = value" text. Keys are
   "section.name", e.g. "grid.nx" or "recon.method". */
DTEM_API dtem_status dtem_config_new(dtem_config** out);
DTEM_API dtem_status dtem_config_load(const char* path, dtem_config** out);
/* Rejects unknown keys and values that fail validation; the config is left
   unchanged on failure. */
DTEM_API dtem_status dtem_config_set(dtem_config* config, const char* key, const char* value);
/* Applies several assignments at once, validating only the result. */
DTEM_API dtem_status dtem_config_set_many(dtem_config* config, const char* const* keys, const char* const* values,
                                          size_t count);
/* Copies the current (normalised) value into buf; *needed receives the
   length including the terminator. */
DTEM_API dtem_status dtem_config_get(const dtem_config* config, const char* key, char* buf, size_t size,
                                     size_t* needed);
DTEM_API dtem_status dtem_config_save(const dtem_config* config, const char* path);
DTEM_API void dtem_config_free(dtem_config* config);
DTEM_API size_t dtem_config_key_count(void);
DTEM_API const char* dtem_config_key(size_t index);

/* Forward simulation into out_dir (NULL: the configured run.output). */
DTEM_API dtem_status dtem_simulate(const dtem_config* config, const char* out_dir, size_t* sets_written);

/* Reconstruction of one (tie_dt, ct) or more (dt) projection-set
   directories. `truth` may be NULL; `report` may be NULL. */
DTEM_API dtem_status dtem_reconstruct(const dtem_config* config, const char* const* inputs, size_t count,
                                      const char* out_dir, const char* truth, dtem_report** report);
DTEM_API int dtem_report_has_truth(const dtem_report* report);
/* Named scalar: rms, rms_over_peak, correlation, mean_percent, max_percent,
   site_count, negative_site_peaks, min_site_peak, coverage,
   imaginary_residual. */
DTEM_API dtem_status dtem_report_get(const dtem_report* report, const char* name, double* value);
/* Human-readable summary; owned by the report. */
DTEM_API const char* dtem_report_text(const dtem_report* report);
DTEM_API void dtem_report_free(dtem_report* report);

DTEM_API dtem_status dtem_figures(const char* const* run_dirs, size_t count, const char* out_dir,
                                  size_t* files_written);

/* Quick installation check; one line per check through `fn`. */
DTEM_API dtem_status dtem_selftest(dtem_line_fn fn, void* user, int* failures);

#ifdef __cplusplus
}
#endif

#endif
