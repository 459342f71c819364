/* cxrisk — survival prognosis toolkit over pooled image feature maps.
 *
 * C interface to the shared library. All functions return a cxrisk_status;
 * handles are opaque and must be released with the matching destroy call.
 * On failure, cxrisk_last_error() returns a thread-local description of the
 * most recent error raised on the calling thread.
 */
#ifndef CXRISK_H
#define CXRISK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define CXRISK_API __declspec(dllexport)
#else
#  define CXRISK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cxrisk_status {
  CXRISK_OK = 0,
  CXRISK_PARTIAL = 1,          /* run finished; some subjects failed (see errors sidecar) */
  CXRISK_ERROR = 2,            /* unclassified failure */
  CXRISK_ERR_NULL = 3,         /* a required pointer argument was NULL */
  CXRISK_ERR_INVALID = 4,      /* invalid argument or configuration value */
  CXRISK_ERR_IO = 5,           /* file missing or unwritable */
  CXRISK_ERR_PARSE = 6,        /* malformed input file */
  CXRISK_ERR_NO_EVENTS = 7,    /* cohort contains no observable events */
  CXRISK_ERR_BUFFER = 8        /* caller-supplied buffer too small */
} cxrisk_status;

typedef struct cxrisk_config cxrisk_config; /* key-value run configuration */
typedef struct cxrisk_model cxrisk_model;   /* trained sigmoid risk head */

CXRISK_API const char* cxrisk_version(void);
CXRISK_API const char* cxrisk_last_error(void);

/* ---- configuration ------------------------------------------------------ */

CXRISK_API cxrisk_status cxrisk_config_create(cxrisk_config** out);
CXRISK_API void cxrisk_config_destroy(cxrisk_config* cfg);

/* Loads "key = value" lines; later assignments win. */
CXRISK_API cxrisk_status cxrisk_config_load_file(cxrisk_config* cfg, const char* path);
CXRISK_API cxrisk_status cxrisk_config_set(cxrisk_config* cfg, const char* key, const char* value);

/* Copies the stored value into buf (NUL-terminated). Unset keys fail with
 * CXRISK_ERR_INVALID; a too-small buffer fails with CXRISK_ERR_BUFFER. */
CXRISK_API cxrisk_status cxrisk_config_get(const cxrisk_config* cfg, const char* key,
                                           char* buf, size_t buf_len);

/* ---- pipeline commands --------------------------------------------------- */
/* Outputs land under the configured out_dir. Per-subject failures never abort
 * a run: the command writes an errors sidecar and returns CXRISK_PARTIAL. */

CXRISK_API cxrisk_status cxrisk_run_synth(const cxrisk_config* cfg);
CXRISK_API cxrisk_status cxrisk_run_train(const cxrisk_config* cfg);
CXRISK_API cxrisk_status cxrisk_run_predict(const cxrisk_config* cfg);
CXRISK_API cxrisk_status cxrisk_run_cam(const cxrisk_config* cfg);
CXRISK_API cxrisk_status cxrisk_run_complete(const cxrisk_config* cfg);
CXRISK_API cxrisk_status cxrisk_run_report(const cxrisk_config* cfg);
CXRISK_API cxrisk_status cxrisk_run_evaluate(const cxrisk_config* cfg);

/* ---- direct model access -------------------------------------------------- */

CXRISK_API cxrisk_status cxrisk_model_create(cxrisk_model** out, const double* weights,
                                             uint32_t channels, double bias);
CXRISK_API cxrisk_status cxrisk_model_load(cxrisk_model** out, const char* path);
CXRISK_API cxrisk_status cxrisk_model_save(const cxrisk_model* model, const char* path);
CXRISK_API void cxrisk_model_destroy(cxrisk_model* model);
CXRISK_API cxrisk_status cxrisk_model_channels(const cxrisk_model* model, uint32_t* out);

/* Risk in (0,1) from a C x H x W feature tensor (channel-major, row-major). */
CXRISK_API cxrisk_status cxrisk_model_predict(const cxrisk_model* model, const float* values,
                                              uint32_t channels, uint32_t height, uint32_t width,
                                              double* risk_out);

/* Risk activation map resampled to out_h x out_w; out_values must hold
 * out_h * out_w doubles (row-major, non-negative). */
CXRISK_API cxrisk_status cxrisk_model_cam(const cxrisk_model* model, const float* values,
                                          uint32_t channels, uint32_t height, uint32_t width,
                                          uint32_t out_h, uint32_t out_w, double* out_values);

#ifdef __cplusplus
}
#endif

#endif /* CXRISK_H */
