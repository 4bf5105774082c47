#ifndef SYMFLOW_SYMFLOW_H
#define SYMFLOW_SYMFLOW_H

/* C interface to the symflow library. Every handle is opaque and owned by the
 * caller once returned through an out-parameter; release it with the matching
 * *_free function. Functions returning symflow_status leave a message for
 * symflow_last_error() on the calling thread when they fail. Strings returned
 * by accessors are borrowed and live as long as the handle they came from. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(SYMFLOW_BUILDING_LIBRARY)
#    define SYMFLOW_API __declspec(dllexport)
#  else
#    define SYMFLOW_API __declspec(dllimport)
#  endif
#else
#  define SYMFLOW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum symflow_status {
  SYMFLOW_OK = 0,
  SYMFLOW_ERR_INVALID_ARGUMENT = 1,
  SYMFLOW_ERR_INVALID_STATE = 2,
  SYMFLOW_ERR_CONFIG = 3,
  SYMFLOW_ERR_NUMERICAL = 4,
  SYMFLOW_ERR_IO = 5,
  SYMFLOW_ERR_INTERNAL = 6
} symflow_status;

typedef enum symflow_check_status {
  SYMFLOW_CHECK_PASS = 0,
  SYMFLOW_CHECK_FAIL = 1,
  SYMFLOW_CHECK_NOT_APPLICABLE = 2
} symflow_check_status;

typedef struct symflow_config symflow_config;
typedef struct symflow_run symflow_run;
typedef struct symflow_report symflow_report;

/* One row of diagnostics, in CSV column order. */
typedef struct symflow_record {
  double t, dt, V, E, min_S, max_gradu_sq, max_riem, gauss_bonnet, L;
  double detG_min, detG_max, max_energy_density;
  double w_plus;
  int has_w_plus;
  double u_min, u_max;
} symflow_record;

typedef struct symflow_check {
  const char* name;
  symflow_check_status status;
  double worst_margin;
  double time_of_worst;
  int diagnostic; /* failures of diagnostic checks do not fail the report */
  const char* detail;
} symflow_check;

typedef struct symflow_fit {
  const char* kind;
  double slope, intercept, r2;
  size_t samples;
  double value;
  double reference;
  int has_reference;
  int pass; /* 1 pass, 0 fail, -1 reported without assertion */
} symflow_fit;

typedef struct symflow_singularity {
  double t_singular;
  double normalized_min, normalized_max;
  double roundness;
  double u_oscillation;
} symflow_singularity;

SYMFLOW_API const char* symflow_version(void);
SYMFLOW_API const char* symflow_last_error(void);

SYMFLOW_API size_t symflow_preset_count(void);
/* NULL when index is out of range. */
SYMFLOW_API const char* symflow_preset_name(size_t index);

SYMFLOW_API symflow_status symflow_config_preset(const char* name, symflow_config** out);
SYMFLOW_API symflow_status symflow_config_parse(const char* text, symflow_config** out);
SYMFLOW_API symflow_status symflow_config_load(const char* path, symflow_config** out);
/* "section.key=value" */
SYMFLOW_API symflow_status symflow_config_override(symflow_config* c, const char* assignment);
/* Writes the canonical text into buf (NUL-terminated, truncated to cap) and
 * the full length including the terminator into *needed. buf may be NULL when
 * cap is 0. */
SYMFLOW_API symflow_status symflow_config_serialize(const symflow_config* c, char* buf,
                                                    size_t cap, size_t* needed);
SYMFLOW_API void symflow_config_free(symflow_config* c);

SYMFLOW_API symflow_status symflow_run_scenario(const symflow_config* c, symflow_run** out);
SYMFLOW_API size_t symflow_run_record_count(const symflow_run* r);
SYMFLOW_API symflow_status symflow_run_record(const symflow_run* r, size_t index,
                                              symflow_record* out);
SYMFLOW_API const char* symflow_run_stop_reason(const symflow_run* r);
SYMFLOW_API size_t symflow_run_accepted_steps(const symflow_run* r);
/* Borrowed; owned by the run. */
SYMFLOW_API const symflow_report* symflow_run_report(const symflow_run* r);
SYMFLOW_API size_t symflow_run_fit_count(const symflow_run* r);
SYMFLOW_API symflow_status symflow_run_fit(const symflow_run* r, size_t index, symflow_fit* out);
/* SYMFLOW_ERR_INVALID_STATE when the run produced no singularity profile. */
SYMFLOW_API symflow_status symflow_run_singularity(const symflow_run* r,
                                                   symflow_singularity* out);
/* 1 when every non-diagnostic check passed. */
SYMFLOW_API int symflow_run_passed(const symflow_run* r);
SYMFLOW_API void symflow_run_free(symflow_run* r);

/* Re-verifies a stored trajectory directory. Tolerances come from the config
 * (may be NULL for defaults). */
SYMFLOW_API symflow_status symflow_verify_dir(const char* dir, const symflow_config* c,
                                              symflow_report** out);
SYMFLOW_API size_t symflow_report_check_count(const symflow_report* r);
SYMFLOW_API symflow_status symflow_report_check(const symflow_report* r, size_t index,
                                                symflow_check* out);
SYMFLOW_API int symflow_report_passed(const symflow_report* r);
/* Same buffer convention as symflow_config_serialize. */
SYMFLOW_API symflow_status symflow_report_text(const symflow_report* r, char* buf, size_t cap,
                                               size_t* needed);
SYMFLOW_API void symflow_report_free(symflow_report* r);

/* kind: "exp-flat", "sol-power", "growth-exponent" or "curvature-decay".
 * An unknown kind is SYMFLOW_ERR_CONFIG. out->kind points at a static string. */
SYMFLOW_API symflow_status symflow_fit_dir(const char* dir, const char* kind, symflow_fit* out);

/* Parabolic rescaling of a stored trajectory by factor s. kind:
 * "warped-2d", "warped-3d" or "bundle"; NULL picks warped-2d for warped
 * trajectories and bundle for bundle trajectories. */
SYMFLOW_API symflow_status symflow_rescale_dir(const char* in_dir, const char* out_dir,
                                               double factor, const char* kind);

#ifdef __cplusplus
}
#endif

#endif
