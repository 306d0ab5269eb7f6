#ifndef MDCERT_MDCERT_H
#define MDCERT_MDCERT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MDCERT_BUILDING)
#define MDC_API __declspec(dllexport)
#else
#define MDC_API __declspec(dllimport)
#endif
#else
#define MDC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdc_status {
  MDC_OK = 0,
  MDC_ERR_INVALID_ARGUMENT = 1,
  MDC_ERR_DEGENERATE = 2,
  MDC_ERR_WINDOW_VIOLATION = 3,
  MDC_ERR_CHECK_FAILED = 4,
  MDC_ERR_HYPOTHESIS_FAILED = 5,
  MDC_ERR_INSUFFICIENT_SAMPLES = 6,
  MDC_ERR_NOT_ANCHORED = 7,
  MDC_ERR_SEARCH_CAP = 8,
  MDC_ERR_UNSUPPORTED = 9,
  MDC_ERR_IO = 10,
  MDC_ERR_NULL_HANDLE = 11,
  MDC_ERR_NO_CONFIG = 12,
  MDC_ERR_INTERNAL = 99
} mdc_status;

typedef struct mdc_context mdc_context;

MDC_API const char* mdc_version(void);
MDC_API const char* mdc_status_name(mdc_status status);

/* Returns NULL on allocation failure. */
MDC_API mdc_context* mdc_create(void);
MDC_API void mdc_destroy(mdc_context* ctx);

/* Message of the last failed call on this context; "" after a success. */
MDC_API const char* mdc_last_error(const mdc_context* ctx);

MDC_API mdc_status mdc_load_config_file(mdc_context* ctx, const char* path);
MDC_API mdc_status mdc_load_config_string(mdc_context* ctx, const char* json);

/* Overrides applied on top of the loaded config. */
MDC_API mdc_status mdc_set_seed(mdc_context* ctx, uint64_t seed);
MDC_API mdc_status mdc_set_samples(mdc_context* ctx, uint64_t samples);
MDC_API mdc_status mdc_set_threads(mdc_context* ctx, int threads);
/* Directory receiving output files; NULL or "" writes nothing. */
MDC_API mdc_status mdc_set_out_dir(mdc_context* ctx, const char* dir);

/* *passed (optional) receives 1 iff every check or row passed. */
MDC_API mdc_status mdc_certify(mdc_context* ctx, int* passed);
MDC_API mdc_status mdc_verify(mdc_context* ctx, int* passed);
MDC_API mdc_status mdc_plotdata(mdc_context* ctx, const char* run_dir);

/* Accessors for the last successful command. */
MDC_API mdc_status mdc_result_json(const mdc_context* ctx, char** out); /* free with mdc_string_free */
MDC_API mdc_status mdc_report_counts(const mdc_context* ctx, size_t* rows, size_t* failures,
                                     size_t* refused);
MDC_API mdc_status mdc_log2_c_final(const mdc_context* ctx, double* out);
MDC_API void mdc_string_free(char* s);

/* Stateless primitives. */
MDC_API mdc_status mdc_cascade_threshold(double C1, int dim, double* out);
MDC_API mdc_status mdc_theorem_log2_constant(double C1, double C2, int dim, double Md,
                                             double* log2_C, double* log2_C_final);
MDC_API mdc_status mdc_optimal_holder(double A, double x, double* p, double* q, double* value);

#ifdef __cplusplus
}
#endif

#endif
