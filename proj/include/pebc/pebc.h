#ifndef PEBC_PEBC_H
#define PEBC_PEBC_H

#include <stddef.h>

#if defined(PEBC_BUILDING_LIBRARY)
#define PEBC_API __attribute__((visibility("default")))
#else
#define PEBC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pebc_status {
    PEBC_OK = 0,
    PEBC_CONDITION_FAIL = 2,
    PEBC_DIVERGED = 3,
    PEBC_CONFIG_ERROR = 4,
    PEBC_INVALID_ARGUMENT = 5,
    PEBC_NUMERICAL = 6,
    PEBC_IO = 7,
    PEBC_INTERNAL = 8
} pebc_status;

typedef struct pebc_kernel pebc_kernel;
typedef struct pebc_config pebc_config;
typedef struct pebc_report pebc_report;

PEBC_API const char* pebc_version(void);

/* Message of the last failed call on this thread; empty after success. */
PEBC_API const char* pebc_last_error(void);
/* Config line of the last PEBC_CONFIG_ERROR on this thread, 0 if none. */
PEBC_API int pebc_last_error_line(void);

/* Backstepping kernel on a uniform grid with n_points nodes. */
PEBC_API pebc_status pebc_kernel_build(double c1, size_t n_points, pebc_kernel** out);
PEBC_API void pebc_kernel_free(pebc_kernel* kernel);
PEBC_API size_t pebc_kernel_size(const pebc_kernel* kernel);
PEBC_API pebc_status pebc_kernel_value(const pebc_kernel* kernel, size_t i, size_t j, double* out);
PEBC_API pebc_status pebc_kernel_k11(const pebc_kernel* kernel, double* out);
PEBC_API pebc_status pebc_kernel_l2_norm(const pebc_kernel* kernel, double* out);
/* path "-" writes to stdout. */
PEBC_API pebc_status pebc_kernel_write_csv(const pebc_kernel* kernel, const char* path);

/* Kernel norm bound for c1 > 0; +inf when it leaves double range. */
PEBC_API pebc_status pebc_nc1(double c1, double* out);

PEBC_API pebc_status pebc_config_load(const char* path, pebc_config** out);
PEBC_API pebc_status pebc_config_parse(const char* text, pebc_config** out);
/* Sets one key as in a config file and re-validates. */
PEBC_API pebc_status pebc_config_set(pebc_config* config, const char* key, const char* value);
PEBC_API void pebc_config_free(pebc_config* config);

/* Gain report without simulation. Returns PEBC_OK or PEBC_CONDITION_FAIL
   for the condition the config mode relies on; *out is set in both cases. */
PEBC_API pebc_status pebc_check_gains(const pebc_config* config, pebc_report** out);

/* Smallest c1 <= c1_max with K1 >= target. *feasible is 0 when none exists. */
PEBC_API pebc_status pebc_find_c1(const pebc_config* config, double target_k1, double c1_max,
                                  double* c1_out, int* feasible);

/* Runs the scenario. Returns PEBC_OK, PEBC_CONDITION_FAIL or PEBC_DIVERGED
   with *out set, or an error code with *out left NULL. */
PEBC_API pebc_status pebc_simulate(const pebc_config* config, int write_csv, pebc_report** out);

/* axis: "key=start:stop:count". path "-" writes to stdout. */
PEBC_API pebc_status pebc_sweep(const pebc_config* config, const char* axis, const char* path);

/* key=value text; the pointer lives as long as the report. */
PEBC_API const char* pebc_report_text(const pebc_report* report);
/* Numeric entry of the report text, e.g. "K1" or "fitted_rate". */
PEBC_API pebc_status pebc_report_value(const pebc_report* report, const char* key, double* out);
PEBC_API int pebc_report_pass(const pebc_report* report);
PEBC_API void pebc_report_free(pebc_report* report);

#ifdef __cplusplus
}
#endif

#endif
