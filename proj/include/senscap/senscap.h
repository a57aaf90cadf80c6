/*
 * C interface to the senscap library.
 *
 * All objects are opaque handles created by a *_create / *_parse / run call
 * and released with the matching *_destroy. Every call returns a
 * senscap_status; on failure senscap_last_error() describes the problem for
 * the calling thread.
 */
#ifndef SENSCAP_H
#define SENSCAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SENSCAP_BUILDING)
#    define SENSCAP_API __declspec(dllexport)
#  else
#    define SENSCAP_API __declspec(dllimport)
#  endif
#else
#  define SENSCAP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum senscap_status {
  SENSCAP_OK = 0,
  SENSCAP_ERR_INVALID_ARGUMENT = 1,
  SENSCAP_ERR_INVALID_GRID = 2,
  SENSCAP_ERR_INVALID_MODEL = 3,
  SENSCAP_ERR_ENUMERATION_TOO_LARGE = 4,
  SENSCAP_ERR_COVERAGE_OVERLAP = 5,
  SENSCAP_ERR_PATTERN_SIZE = 6,
  SENSCAP_ERR_DIMENSION_MISMATCH = 7,
  SENSCAP_ERR_INVALID_CHANNEL = 8,
  SENSCAP_ERR_INVALID_SENSING = 9,
  SENSCAP_ERR_UNDEFINED_CONDITIONAL = 10,
  SENSCAP_ERR_INCONSISTENT_TYPES = 11,
  SENSCAP_ERR_WRONG_DIRECTION = 12,
  SENSCAP_ERR_INFEASIBLE = 13,
  SENSCAP_ERR_CONFIG = 14,
  SENSCAP_ERR_IO = 15,
  SENSCAP_ERR_INTERNAL = 99
} senscap_status;

typedef struct senscap_model senscap_model;
typedef struct senscap_sensing senscap_sensing;
typedef struct senscap_channel senscap_channel;
typedef struct senscap_config senscap_config;
typedef struct senscap_table senscap_table;
typedef struct senscap_report senscap_report;

typedef struct senscap_optimizer_options {
  double theta_tol;
  double inner_tol;
  double eps_dist;
  int restarts;
  int max_iters;
} senscap_optimizer_options;

typedef struct senscap_bound {
  int constrained;           /* 0 when no feasible point has DENOM > 0 */
  double value;              /* C_LB; +inf when unconstrained */
  double certificate;
  double witness_distortion;
  double numerator;
  double denom;
  int iterations;
} senscap_bound;

SENSCAP_API const char* senscap_version(void);
SENSCAP_API const char* senscap_status_string(senscap_status status);
SENSCAP_API const char* senscap_last_error(void);

/* Models. p_edge is row-major with p_edge[2*a + b] = P(a | b). */
SENSCAP_API senscap_status senscap_model_create(const double p_node[2], const double p_edge[4],
                                                senscap_model** out);
SENSCAP_API senscap_status senscap_model_create_symmetric(double p, senscap_model** out);
SENSCAP_API void senscap_model_destroy(senscap_model* model);
SENSCAP_API senscap_status senscap_model_w(const senscap_model* model, double* out);
SENSCAP_API senscap_status senscap_model_typical_type(const senscap_model* model, double out[32]);
SENSCAP_API senscap_status senscap_model_log2_partition(const senscap_model* model, int k,
                                                        double* out);

/* Sensing functions. */
SENSCAP_API senscap_status senscap_sensing_identity(senscap_sensing** out);
SENSCAP_API senscap_status senscap_sensing_count(int c, senscap_sensing** out);
SENSCAP_API senscap_status senscap_sensing_weighted_sum(int c, const double* weights, size_t count,
                                                        senscap_sensing** out);
SENSCAP_API senscap_status senscap_sensing_lookup(int c, const int* table, size_t count,
                                                  senscap_sensing** out);
SENSCAP_API void senscap_sensing_destroy(senscap_sensing* psi);
SENSCAP_API senscap_status senscap_sensing_sense(const senscap_sensing* psi, const uint8_t* bits,
                                                 size_t count, int* symbol);

/* Channels. matrix is row-major inputs × outputs. */
SENSCAP_API senscap_status senscap_channel_symmetric(int symbols, double q, senscap_channel** out);
SENSCAP_API senscap_status senscap_channel_matrix(const double* matrix, int inputs, int outputs,
                                                  senscap_channel** out);
SENSCAP_API void senscap_channel_destroy(senscap_channel* channel);

/* Capacity bound for c ∈ {0, 1}. options may be NULL for defaults. */
SENSCAP_API void senscap_optimizer_defaults(senscap_optimizer_options* options);
SENSCAP_API senscap_status senscap_capacity_bound(const senscap_model* model, int c,
                                                  const senscap_sensing* psi,
                                                  const senscap_channel* channel, double D,
                                                  const senscap_optimizer_options* options,
                                                  senscap_bound* out);

/* JSON run configurations and CSV tables. */
SENSCAP_API senscap_status senscap_config_parse(const char* json, senscap_config** out);
SENSCAP_API void senscap_config_destroy(senscap_config* config);
SENSCAP_API senscap_status senscap_run_bound(const senscap_config* config, senscap_table** out);
SENSCAP_API senscap_status senscap_run_simulate(const senscap_config* config, senscap_table** out);
SENSCAP_API size_t senscap_table_rows(const senscap_table* table);
SENSCAP_API size_t senscap_table_cols(const senscap_table* table);
/* Cell text; row 0 is the header. NULL when out of range. */
SENSCAP_API const char* senscap_table_cell(const senscap_table* table, size_t row, size_t col);
/* Whole table as CSV; owned by the table. */
SENSCAP_API const char* senscap_table_csv(const senscap_table* table);
SENSCAP_API void senscap_table_destroy(senscap_table* table);

/* Invariant suites. level is "fast" or "full". */
SENSCAP_API senscap_status senscap_validate(const char* level, senscap_report** out);
SENSCAP_API int senscap_report_passed(const senscap_report* report);
SENSCAP_API const char* senscap_report_text(const senscap_report* report);
SENSCAP_API void senscap_report_destroy(senscap_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SENSCAP_H */
