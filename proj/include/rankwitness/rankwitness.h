#ifndef RANKWITNESS_RANKWITNESS_H
#define RANKWITNESS_RANKWITNESS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RANKWITNESS_BUILDING)
#    define RW_API __declspec(dllexport)
#  else
#    define RW_API __declspec(dllimport)
#  endif
#else
#  define RW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/*
 * Conventions
 *   - Every fallible call returns rw_status; on failure rw_last_error() holds
 *     a message for the calling thread until its next failing call.
 *   - Strings returned through char** are heap allocated and must be released
 *     with rw_string_free().
 *   - Handles are immutable after construction and may be shared between
 *     threads for reading. A config may not be mutated while in use.
 *   - JSON outputs are single documents with object keys sorted.
 */

typedef enum rw_status {
    RW_OK = 0,
    RW_INVALID_ARGUMENT = 1,
    RW_CYCLE_DETECTED = 2,
    RW_UNKNOWN_VARIABLE = 3,
    RW_DUPLICATE_NAME = 4,
    RW_INVALID_PATH = 5,
    RW_NEGATIVE_ENTRY = 6,
    RW_NOT_NORMALIZED = 7,
    RW_SHAPE_MISMATCH = 8,
    RW_ZERO_CONDITIONING_EVENT = 9,
    RW_NON_BINARY_AXIS = 10,
    RW_INFEASIBLE_MOMENTS = 11,
    RW_TOO_LARGE = 12,
    RW_ZERO_MASS_COMPONENT = 13,
    RW_OUT_OF_RANGE = 14,
    RW_NO_OBSERVED_DATA = 15,
    RW_PARSE_ERROR = 16,
    RW_IO_ERROR = 17,
    RW_INTERNAL_ERROR = 99
} rw_status;

typedef enum rw_verdict {
    RW_CONSISTENT = 0,
    RW_REFUTED = 1,
    RW_INCONCLUSIVE = 2
} rw_verdict;

typedef enum rw_arith {
    RW_ARITH_AUTO = 0, /* exact for rational inputs, float otherwise */
    RW_ARITH_FLOAT = 1,
    RW_ARITH_EXACT = 2
} rw_arith;

typedef struct rw_graph rw_graph;
typedef struct rw_dist rw_dist;
typedef struct rw_config rw_config;

typedef struct rw_rank_result {
    size_t lower;
    size_t upper;
    int exact;
} rw_rank_result;

RW_API const char* rw_version(void);
RW_API const char* rw_status_name(rw_status status);
RW_API const char* rw_verdict_name(rw_verdict verdict);
RW_API const char* rw_last_error(void);
RW_API void rw_string_free(char* s);

/* Search configuration. Defaults: restarts 32, max_iters 5000, tol 1e-9,
 * seed 0, exact_lb_max_support 24, automatic arithmetic, PSD tolerance 1e-8,
 * PSD search budget 60 s. */
RW_API rw_config* rw_config_new(void);
RW_API void rw_config_free(rw_config* cfg);
RW_API rw_status rw_config_set_restarts(rw_config* cfg, int restarts);
RW_API rw_status rw_config_set_max_iters(rw_config* cfg, int max_iters);
RW_API rw_status rw_config_set_tol(rw_config* cfg, double tol);
RW_API rw_status rw_config_set_seed(rw_config* cfg, uint64_t seed);
RW_API rw_status rw_config_set_exact_lb_max_support(rw_config* cfg, size_t cells);
RW_API rw_status rw_config_set_arith(rw_config* cfg, rw_arith arith);
RW_API rw_status rw_config_set_psd_tol(rw_config* cfg, double tol);
RW_API rw_status rw_config_set_psd_time_budget_ms(rw_config* cfg, int64_t ms);

/* Graphs */
RW_API rw_status rw_graph_from_json(const char* json, rw_graph** out);
RW_API void rw_graph_free(rw_graph* g);
RW_API rw_status rw_graph_to_json(const rw_graph* g, char** out_json);
RW_API rw_status rw_graph_to_dot(const rw_graph* g, char** out_dot);
RW_API rw_status rw_graph_d_separated(const rw_graph* g, const char* const* x, size_t nx, const char* const* y,
                                      size_t ny, const char* const* z, size_t nz, int* out);
RW_API rw_status rw_graph_path_blocked(const rw_graph* g, const char* const* path, size_t npath,
                                       const char* const* z, size_t nz, int* out);
/* {"separators":[{"members":[..],"cardinality":n}],"max_cardinality":n} */
RW_API rw_status rw_graph_hidden_separators(const rw_graph* g, const char* x, const char* y,
                                            const char* const* conditioned, size_t nconditioned,
                                            char** out_json);

/* Distributions */
RW_API rw_status rw_dist_from_json(const char* json, rw_dist** out);
/* Two-axis matrix, one CSV line per row; axes are named X and Y. */
RW_API rw_status rw_dist_from_csv(const char* csv, rw_dist** out);
RW_API void rw_dist_free(rw_dist* d);
RW_API int rw_dist_is_exact(const rw_dist* d);
RW_API size_t rw_dist_num_axes(const rw_dist* d);
/* Name of axis i; the pointer lives as long as the handle. NULL when out of range. */
RW_API const char* rw_dist_axis_name(const rw_dist* d, size_t i);
RW_API rw_status rw_dist_to_json(const rw_dist* d, char** out_json);
RW_API rw_status rw_dist_slice(const rw_dist* d, const char* variable, size_t value, rw_dist** out,
                               double* out_probability);
RW_API rw_status rw_dist_marginalize(const rw_dist* d, const char* const* keep, size_t nkeep, rw_dist** out);
/* Moments over binary axes: {"names":[..],"moments":[..]} indexed by subset bitmask. */
RW_API rw_status rw_dist_expectations(const rw_dist* d, char** out_json);
RW_API rw_status rw_dist_from_expectations(const char* json, rw_dist** out);

/* Nonnegative rank of a two-axis distribution. certificate_json may be NULL or
 * a factorization document that is verified before use. Either output
 * pointer may be NULL. */
RW_API rw_status rw_rank(const rw_dist* d, const rw_config* cfg, const char* certificate_json,
                         rw_rank_result* out, char** out_json);
/* Latent form of a factorization document: {"p_z":..,"cond_x":..,"cond_y":..,"dropped_components":n} */
RW_API rw_status rw_factorization_to_latent(const char* factorization_json, char** out_json);

/* PSD rank bounds. certificate_json may be NULL. When search_width > 0 a
 * numerical search for a factorization of that width runs first. */
RW_API rw_status rw_psd_rank(const rw_dist* d, const rw_config* cfg, const char* certificate_json,
                             size_t search_width, rw_rank_result* out, char** out_json);

/* Direct-influence witness. x or y may be NULL to take the graph's hypothesis
 * block or, failing that, the first two data axes. conditioning == NULL means
 * the same default (hypothesis block, else the remaining data axes); pass a
 * non-NULL pointer with nconditioning == 0 for an explicitly empty set. */
RW_API rw_status rw_witness(const rw_graph* g, const rw_dist* d, const char* x, const char* y,
                            const char* const* conditioning, size_t nconditioning, const rw_config* cfg,
                            rw_verdict* out_verdict, char** out_json);
/* Single two-axis check against a promised separator cardinality. */
RW_API rw_status rw_cardinality_check(const rw_dist* d, uint64_t separator_cardinality, const rw_config* cfg,
                                      rw_verdict* out_verdict, char** out_json);
RW_API rw_status rw_lower_bound_hidden_cardinality(const rw_dist* d, const rw_config* cfg, size_t* out);

/* Binary perfect-correlation constraints. Each pair is (<.|z=+1>, <.|z=-1>). */
RW_API rw_status rw_perfect_correlation(const double ex_x[2], const double ex_y[2], const double ex_xy[2],
                                        double tol, rw_verdict* out_verdict, char** out_json);
RW_API rw_status rw_response_oracle(const double target_ex_x[2], double tol, int grid_steps, int* out_feasible,
                                    char** out_json);
/* CSV "ex_x_plus,ex_x_minus,feasible" over a grid x grid lattice of [-1,1]^2. */
RW_API rw_status rw_oracle_grid_csv(int grid, double tol, int grid_steps, char** out_csv);

/* Protocols */
RW_API rw_status rw_protocol_simulate(const char* protocol_json, rw_dist** out_dist, char** out_json);
/* Rank bounds of the simulated output with the protocol's own factorization injected. */
RW_API rw_status rw_protocol_rank(const char* protocol_json, const rw_config* cfg, rw_rank_result* out,
                                  char** out_json);
RW_API rw_status rw_complexity(const rw_dist* d, const rw_config* cfg, char** out_json);
RW_API rw_status rw_tradeoff(const rw_dist* d, uint64_t card_z1, uint64_t card_z2, const rw_config* cfg,
                             int* out_holds, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
