#ifndef LEVYEQ_H
#define LEVYEQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LQ_API __declspec(dllexport)
#else
#define LQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lq_status {
  LQ_OK = 0,
  LQ_ERR_ARGUMENT = 1,
  LQ_ERR_CONFIG = 2,
  LQ_ERR_DIVERGENCE = 3,
  LQ_ERR_DOMAIN = 4,
  LQ_ERR_SINGULAR = 5,
  LQ_ERR_CONDITION = 6,
  LQ_ERR_INTERNAL = 7
} lq_status;

typedef struct lq_measure lq_measure;
typedef struct lq_discretized lq_discretized;
typedef struct lq_path lq_path;
typedef struct lq_report lq_report;

/* Message and offending config field of the last failure on this thread.
   Both stay valid until the next failing call on the same thread; the field
   is "" when the failure is not tied to a config key. */
LQ_API const char* lq_last_error(void);
LQ_API const char* lq_last_error_field(void);
LQ_API const char* lq_status_name(lq_status status);
LQ_API const char* lq_version(void);

/* Measures */
LQ_API lq_status lq_measure_from_json(const char* config_json, lq_measure** out);
LQ_API void lq_measure_free(lq_measure* measure);
LQ_API lq_status lq_measure_ratio(const lq_measure* measure, double y, double* out);
/* nu(]lo, hi]); infinite ends are passed as +-HUGE_VAL. */
LQ_API lq_status lq_interval_mass(const lq_measure* measure, double lo, double hi, double tol, double* value,
                                  double* error);

/* Grid and discretization */
LQ_API size_t lq_grid_size(int m);
/* Position of the grid interval containing y; LQ_ERR_DOMAIN inside ]-1/m, 1/m]. */
LQ_API lq_status lq_bin_index(int m, double y, size_t* out);
LQ_API lq_status lq_discretize(const lq_measure* measure, int m, double tol, int threads, lq_discretized** out);
LQ_API void lq_discretized_free(lq_discretized* disc);
LQ_API size_t lq_discretized_size(const lq_discretized* disc);
/* Copies up to `capacity` values in grid order; returns the number copied. */
LQ_API size_t lq_discretized_ratios(const lq_discretized* disc, double* out, size_t capacity);
/* nu-mass of each grid interval. */
LQ_API size_t lq_discretized_masses(const lq_discretized* disc, double* out, size_t capacity);
/* D_m by component: out[0] identity, out[1] finite bins, out[2] tails, out[3] total. */
LQ_API lq_status lq_discretization_error(const lq_measure* measure, int m, double tol, int threads, double out[4]);

/* Paths */
LQ_API lq_status lq_simulate(const lq_measure* measure, int m, int full_line, double horizon, double drift,
                             uint64_t seed, uint64_t index, lq_path** out);
LQ_API void lq_path_free(lq_path* path);
LQ_API size_t lq_path_jump_count(const lq_path* path);
LQ_API lq_status lq_path_jump(const lq_path* path, size_t i, double* time, double* size);
/* Jump counts per grid interval; `out` must hold lq_grid_size(m) entries. */
LQ_API lq_status lq_extract_statistic(const lq_path* path, int m, uint64_t* out);

/* Batch commands */
typedef struct lq_options {
  int threads;
  int has_seed;
  uint64_t seed;
  int has_tol;
  double tol;
} lq_options;

LQ_API void lq_options_init(lq_options* options);
LQ_API size_t lq_command_count(void);
LQ_API const char* lq_command_name(size_t i);
/* Parses the configuration only; reports errors as lq_run would. */
LQ_API lq_status lq_check_config(const char* config_json);
/* `output_dir` from the configuration, or "" when absent. The string lives
   until the next call on the same thread. */
LQ_API lq_status lq_config_output_dir(const char* config_json, const char** out);
LQ_API lq_status lq_run(const char* command, const char* config_json, const lq_options* options,
                        lq_report** out);
LQ_API void lq_report_free(lq_report* report);
/* Pretty-printed report document; owned by the report. */
LQ_API const char* lq_report_json(const lq_report* report);
/* The resolved configuration alone, re-runnable as is. */
LQ_API const char* lq_report_config(const lq_report* report);
LQ_API int lq_report_passed(const lq_report* report);
LQ_API size_t lq_report_table_count(const lq_report* report);
LQ_API const char* lq_report_table_name(const lq_report* report, size_t i);
LQ_API const char* lq_report_table_csv(const lq_report* report, size_t i);

#ifdef __cplusplus
}
#endif

#endif
