#ifndef SHORTMEM_SHORTMEM_H
#define SHORTMEM_SHORTMEM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SM_API __declspec(dllexport)
#else
#define SM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sm_status {
    SM_OK = 0,
    SM_ERR_INVALID_ARGUMENT = 1,
    SM_ERR_OUT_OF_RANGE = 2,
    SM_ERR_CAPACITY = 3,
    SM_ERR_PARSE = 4,
    SM_ERR_VALIDATION = 5,
    SM_ERR_NUMERICAL = 6,
    SM_ERR_IO = 7,
    SM_ERR_INVARIANT = 8,
    SM_ERR_INTERNAL = 99
} sm_status;

typedef struct sm_coeffs sm_coeffs;
typedef struct sm_model sm_model;
typedef struct sm_path sm_path;
typedef struct sm_grid sm_grid;
typedef struct sm_config sm_config;

/* Message of the last failure on the calling thread; empty after success. */
SM_API const char* sm_last_error(void);
SM_API const char* sm_status_name(sm_status status);
SM_API const char* sm_version(void);

/* Coefficients. kind is "identity", "geometric", "causal-geometric",
 * "polynomial" or "prop10"; window < 0 picks the smallest window whose
 * certified tail is below eps_tail. */
SM_API sm_status sm_coeffs_create(const char* kind, double param, int64_t window, double eps_tail, sm_coeffs** out);
SM_API sm_status sm_coeffs_finite(int64_t first_index, const double* values, size_t count, sm_coeffs** out);
SM_API void sm_coeffs_free(sm_coeffs* coeffs);
SM_API sm_status sm_coeffs_window(const sm_coeffs* coeffs, int64_t* lo, int64_t* hi);
SM_API sm_status sm_coeffs_at(const sm_coeffs* coeffs, int64_t j, double* out);
SM_API sm_status sm_coeffs_total(const sm_coeffs* coeffs, double* out);
SM_API sm_status sm_coeffs_tail_mass(const sm_coeffs* coeffs, int64_t m, double* out);

/* Innovations. kind is "gaussian", "uniform", "exponential", "mds" or
 * "bm-coupled"; n is the grid size for "bm-coupled" and ignored otherwise. */
SM_API sm_status sm_model_create(const char* kind, double param, uint64_t seed, int64_t n, sm_model** out);
SM_API void sm_model_free(sm_model* model);
/* Writes xi_first .. xi_last into out, which must hold last - first + 1 values. */
SM_API sm_status sm_model_sample(const sm_model* model, int64_t first, int64_t last, double* out);
SM_API sm_status sm_model_variance(const sm_model* model, double* out);
SM_API uint64_t sm_derive_seed(uint64_t master, uint64_t a, uint64_t b);

/* Brownian grid W(k/n), k = 0..n, matching sm_model_create("bm-coupled", 1, seed, n). */
SM_API sm_status sm_grid_create(uint64_t seed, int64_t n, sm_grid** out);
SM_API void sm_grid_free(sm_grid* grid);
SM_API sm_status sm_grid_values(const sm_grid* grid, const double** values, size_t* count);

/* Filtered paths. b_n <= 0 selects sqrt(n). */
SM_API sm_status sm_filter(const sm_coeffs* coeffs, const sm_model* model, int64_t n, double eps_tail, double b_n,
                           sm_path** out);
SM_API void sm_path_free(sm_path* path);
/* S_0 .. S_n; the pointer stays valid until the path is freed. */
SM_API sm_status sm_path_partial_sums(const sm_path* path, const double** values, size_t* count);
SM_API sm_status sm_path_coupling(const sm_path* path, double total, double* out);
SM_API sm_status sm_path_sup_bm(const sm_path* path, double total, const sm_grid* grid, double* out);

SM_API sm_status sm_exact_variance(const sm_coeffs* coeffs, int64_t n, double sigma2, double* out);

/* Batch experiments driven by a key = value config. */
SM_API sm_status sm_config_parse(const char* text, sm_config** out);
SM_API sm_status sm_config_load(const char* path, sm_config** out);
SM_API void sm_config_free(sm_config* config);
SM_API sm_status sm_config_set_out_dir(sm_config* config, const char* dir);
/* Canonical text form; the caller releases it with sm_string_free. */
SM_API sm_status sm_config_format(const sm_config* config, char** out);
SM_API void sm_string_free(char* text);
SM_API sm_status sm_dispatch(const char* command, const sm_config* config, int workers);

#ifdef __cplusplus
}
#endif

#endif
