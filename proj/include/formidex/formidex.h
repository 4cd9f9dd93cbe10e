#ifndef FORMIDEX_H
#define FORMIDEX_H

/* C interface of the formidex library. Every function returning
 * fdx_status leaves a message for fdx_last_error() on failure; output
 * handles are only written on success. Handles are not thread-safe, but
 * distinct handles may be used from different threads. */

#include <stddef.h>

#if defined(_WIN32)
#define FDX_API __declspec(dllexport)
#else
#define FDX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fdx_status {
  FDX_OK = 0,
  FDX_ERR_CONFIG = 2,    /* invalid input, files, parameters */
  FDX_ERR_NUMERICAL = 3, /* poles, singular brackets, non-finite data */
  FDX_ERR_ARGUMENT = 4,  /* null pointers, bad enum values */
  FDX_ERR_INTERNAL = 5
} fdx_status;

typedef struct fdx_device fdx_device;
typedef struct fdx_case fdx_case;
typedef struct fdx_table fdx_table;

FDX_API const char* fdx_version(void);
/* Message of the last failed call on this thread ("" if none). */
FDX_API const char* fdx_last_error(void);

/* ---- devices ---- */

FDX_API fdx_status fdx_device_create(const char* strategy, fdx_device** out);
FDX_API fdx_status fdx_device_set_param(fdx_device* dev, const char* name, double value);
FDX_API fdx_status fdx_device_set_operating_point(fdx_device* dev, double ud, double uq, double id,
                                                  double iq);
/* out[4] = ud, uq, id, iq */
FDX_API fdx_status fdx_device_operating_point(const fdx_device* dev, double out[4]);
FDX_API fdx_status fdx_device_strategy(const fdx_device* dev, const char** name);
FDX_API fdx_status fdx_device_from_json(const char* text, fdx_device** out);
FDX_API fdx_status fdx_device_from_file(const char* path, fdx_device** out);

/* User admittance: fill y with the 2x2 complex matrix in row-major order as
 * (re, im) pairs: y00, y01, y10, y11. Return 0 on success. */
typedef int (*fdx_admittance_fn)(void* user, double s_re, double s_im, double y[8]);
FDX_API fdx_status fdx_device_custom(fdx_admittance_fn fn, void* user, fdx_device** out);

/* Evaluates Y(s) (s in rad/s) with the default 60 Hz base. */
FDX_API fdx_status fdx_device_admittance(const fdx_device* dev, double s_re, double s_im, double y[8]);
FDX_API void fdx_device_free(fdx_device* dev);

/* ---- cases ---- */

FDX_API fdx_status fdx_case_from_json(const char* text, fdx_case** out);
FDX_API fdx_status fdx_case_from_file(const char* path, fdx_case** out);
/* Copy of the device at a retained or the extra bus. */
FDX_API fdx_status fdx_case_device(const fdx_case* c, int bus, fdx_device** out);
/* Replaces the device at a retained or the extra bus (the device is copied). */
FDX_API fdx_status fdx_case_set_device(fdx_case* c, int bus, const fdx_device* dev);
FDX_API fdx_status fdx_case_set_tau(fdx_case* c, double tau);
FDX_API fdx_status fdx_case_set_omega0(fdx_case* c, double omega0);
FDX_API fdx_status fdx_case_tau(const fdx_case* c, double* tau);
FDX_API fdx_status fdx_case_omega0(const fdx_case* c, double* omega0);
FDX_API void fdx_case_free(fdx_case* c);

/* ---- analyses ---- */

typedef struct fdx_grid {
  double fmin_hz;
  double fmax_hz;
  int n_points; /* log-spaced, endpoints included */
} fdx_grid;

FDX_API fdx_grid fdx_default_grid(void);

typedef struct fdx_line {
  double l_g;
  double tau;
  double omega0;
} fdx_line;

FDX_API fdx_line fdx_default_line(void);

/* Columns f_hz, fi; footer notes list the GFM/GFL bands and crossovers. */
FDX_API fdx_status fdx_forming_index(const fdx_device* dev, const fdx_line* line, const fdx_grid* grid,
                                     fdx_table** out);

/* Columns f_hz, kappa, alpha, bound_kappa, bound_alpha, sv_max, vacuous.
 * With a compare case, adds delta_kappa and delta_alpha (compare - c). */
FDX_API fdx_status fdx_strength(const fdx_case* c, const fdx_case* compare, const fdx_grid* grid,
                                fdx_table** out);

typedef enum fdx_axis { FDX_AXIS_D = 0, FDX_AXIS_Q = 1, FDX_AXIS_BOTH = 2 } fdx_axis;

typedef struct fdx_step_options {
  int bus;
  double amplitude;
  fdx_axis axis;
  double t_step;
  double t_end;
  int n_samples;
  double a_damp;
} fdx_step_options;

FDX_API fdx_step_options fdx_default_step_options(void);

/* Columns t_s, then bus_<id>_norm, bus_<id>_ud, bus_<id>_uq per bus. The
 * first header note is "final_value_check=OK" or "final_value_check=FAILED". */
FDX_API fdx_status fdx_step(const fdx_case* c, const fdx_step_options* opt, fdx_table** out);
FDX_API fdx_status fdx_step_final_value_ok(const fdx_table* t, int* ok);

/* Dual-form check of the extra-bus absorption at 1, 10 and 100 Hz.
 * *passed is 1 if every check passed; the report lists each item. */
FDX_API fdx_status fdx_validate(const fdx_case* c, int* passed, fdx_table** report);

/* ---- tables ---- */

FDX_API size_t fdx_table_rows(const fdx_table* t);
FDX_API size_t fdx_table_cols(const fdx_table* t);
FDX_API const char* fdx_table_column_name(const fdx_table* t, size_t col);
/* Pointer to rows() values, valid until the table is freed. */
FDX_API const double* fdx_table_column(const fdx_table* t, size_t col);
FDX_API size_t fdx_table_note_count(const fdx_table* t);
/* Header notes first, then footer notes. */
FDX_API const char* fdx_table_note(const fdx_table* t, size_t i);
/* Adds a key/value pair echoed under "config" in JSON output. */
FDX_API fdx_status fdx_table_set_config(fdx_table* t, const char* key, const char* value);
/* format is "csv" or "json"; free the string with fdx_string_free. */
FDX_API fdx_status fdx_table_render(const fdx_table* t, const char* format, char** out);
/* Atomic write (temporary file + rename). */
FDX_API fdx_status fdx_table_write(const fdx_table* t, const char* path, const char* format);
FDX_API void fdx_table_free(fdx_table* t);
FDX_API void fdx_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* FORMIDEX_H */
