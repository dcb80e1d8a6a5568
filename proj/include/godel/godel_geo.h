#ifndef GODEL_GEO_H
#define GODEL_GEO_H

#include <stddef.h>

#if defined(GODEL_GEO_BUILDING)
#define GODEL_API __attribute__((visibility("default")))
#else
#define GODEL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum godel_status {
  GODEL_OK = 0,
  GODEL_E_DOMAIN = 1,
  GODEL_E_PARSE = 2,
  GODEL_E_DEGENERATE = 3,
  GODEL_E_NULL_NORMAL = 4,
  GODEL_E_PARAMETER = 5,
  GODEL_E_APPLICABILITY = 6,
  GODEL_E_CONFIG = 7,
  GODEL_E_ARGUMENT = 8,
  GODEL_E_INTERNAL = 99
} godel_status;

typedef struct godel_profile godel_profile;
typedef struct godel_report godel_report;

GODEL_API const char* godel_version(void);
/* Message of the last failed call on this thread; empty after a success. */
GODEL_API const char* godel_last_error(void);
GODEL_API const char* godel_status_name(godel_status status);

/* Profiles: class1(m=..,omega=..), class2(omega=..), class3(mu=..,omega=..), class4(alpha=..),
   custom(H="..",D=".."). */
GODEL_API godel_status godel_profile_parse(const char* spec, godel_profile** out);
GODEL_API void godel_profile_free(godel_profile* profile);
/* out = {H, H', H'', D, D', D''} */
GODEL_API godel_status godel_profile_sample(const godel_profile* profile, double r, double out[6]);
/* out = {f1, f2, f3} */
GODEL_API godel_status godel_profile_invariants(const godel_profile* profile, double r, double out[3]);

/* out[16*i + 4*j + k] = k-th frame component of nabla_{E_i} E_j (zero-based). */
GODEL_API godel_status godel_frame_connection(const godel_profile* profile, double r, double out[64]);
/* out[64*i + 16*j + 4*k + l] = l-th frame component of R(E_i, E_j) E_k. */
GODEL_API godel_status godel_frame_curvature(const godel_profile* profile, double r, double out[256]);
/* Max norm of the Codazzi contractions for the normal aE1 + bE2 + cE3 + dE4. */
GODEL_API godel_status godel_codazzi_normal_residual(const godel_profile* profile, double r, const double coeffs[4],
                                                     double* out);

/* Validates a JSON run configuration without running anything; diagnostics carry line numbers. */
GODEL_API godel_status godel_config_check(const char* config_json);
/* Runs verify-geometry, certify-catalog, scan or classify-normal on a JSON run configuration. */
GODEL_API godel_status godel_run(const char* command, const char* config_json, godel_report** out);
GODEL_API void godel_report_free(godel_report* report);
/* 0 iff every non-skipped check passed. */
GODEL_API int godel_report_exit_code(const godel_report* report);
GODEL_API size_t godel_report_failed(const godel_report* report);
/* format is "json", "csv" or "table"; free the result with godel_string_free. */
GODEL_API godel_status godel_report_render(const godel_report* report, const char* format, char** out);
GODEL_API void godel_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
