/*
 * rbffd — adaptive RBF-FD (polyharmonic splines + polynomials) on scattered
 * 2-d node sets.
 *
 * C interface to the shared library. All objects are opaque handles; every
 * fallible call returns an rbffd_status and leaves a message retrievable via
 * rbffd_last_error() (thread-local). Arrays are caller-allocated at the sizes
 * documented per call.
 */
#ifndef RBFFD_H
#define RBFFD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RBFFD_API __declspec(dllexport)
#else
#define RBFFD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rbffd_status {
    RBFFD_OK = 0,
    RBFFD_ERR_INVALID_ARGUMENT = 1,
    RBFFD_ERR_CONFIG = 2,
    RBFFD_ERR_IO = 3,
    RBFFD_ERR_SINGULAR_STENCIL = 4,
    RBFFD_ERR_ILL_CONDITIONED = 5,
    RBFFD_ERR_SOLVER = 6,
    RBFFD_ERR_INTERNAL = 7
} rbffd_status;

typedef struct rbffd_nodeset rbffd_nodeset;
typedef struct rbffd_matrix rbffd_matrix;

typedef struct rbffd_solve_report {
    int64_t iterations;       /* 0 for the direct solver */
    double relative_residual; /* |Au - b|_2 / |b|_2 */
    int32_t used_iterative;   /* 0 dense direct, 1 BiCGSTAB */
    int32_t converged;
} rbffd_solve_report;

RBFFD_API const char* rbffd_version(void);

/* Message for the most recent failure on this thread. */
RBFFD_API const char* rbffd_last_error(void);

/* --- node sets ----------------------------------------------------------
 * domain = {x0, y0, x1, y1}.
 * kind: "tensor-grid" | "halton" | "sine-squash" | "peak-adapted".
 * params_json (peak-adapted only):
 *   {"x_peak":[x,y], "r_min":..., "r_max":..., "R":...}
 */
RBFFD_API rbffd_status rbffd_nodeset_generate(const char* kind, int64_t n_target,
                                              const double domain[4], const char* params_json,
                                              uint64_t seed, rbffd_nodeset** out);
RBFFD_API rbffd_status rbffd_nodeset_load_csv(const char* path, const double domain[4],
                                              rbffd_nodeset** out);
RBFFD_API rbffd_status rbffd_nodeset_save_csv(const rbffd_nodeset* nodes, const char* path);
RBFFD_API int64_t rbffd_nodeset_size(const rbffd_nodeset* nodes);
/* xy: 2N doubles (x0,y0,x1,y1,...); segment: N ints, -1 for interior. */
RBFFD_API rbffd_status rbffd_nodeset_points(const rbffd_nodeset* nodes, double* xy);
RBFFD_API rbffd_status rbffd_nodeset_segments(const rbffd_nodeset* nodes, int32_t* segment);
RBFFD_API rbffd_status rbffd_nodeset_fill_distance(const rbffd_nodeset* nodes,
                                                   int32_t eval_resolution, double* out);
RBFFD_API rbffd_status rbffd_nodeset_separation_distance(const rbffd_nodeset* nodes, double* out);
RBFFD_API rbffd_status rbffd_nodeset_mesh_ratio(const rbffd_nodeset* nodes,
                                                int32_t eval_resolution, double* out);
/* indices: k entries, ascending distance, ties by index. */
RBFFD_API rbffd_status rbffd_nodeset_knn(const rbffd_nodeset* nodes, double x, double y,
                                         int64_t k, int64_t* indices);
RBFFD_API void rbffd_nodeset_destroy(rbffd_nodeset* nodes);

/* (volume/n)^(1/d); negative on invalid input. */
RBFFD_API double rbffd_effective_fill_distance(double volume, int64_t n, int32_t dim);
/* C(p+d,d); 0 on invalid input. */
RBFFD_API int64_t rbffd_basis_count(int32_t degree, int32_t dim);
/* 2*C(p+d,d)+1; 0 on invalid input. */
RBFFD_API int64_t rbffd_stencil_size(int32_t degree, int32_t dim);
RBFFD_API rbffd_status rbffd_select_degree(double h_local, double h_e, int32_t g, int32_t k,
                                           int32_t p_min, int32_t p_max, int32_t* out);

/* --- stencil weights ------------------------------------------------------
 * stencil_xy: 2*n_s doubles, center first. op: "identity" | "dx" | "dy" |
 * "laplacian" | "directional" (direction = unit vector, required for
 * "directional", ignored otherwise; may be NULL).
 * weights: n_s doubles. multipliers: C(degree+2,2) doubles or NULL.
 */
RBFFD_API rbffd_status rbffd_compute_weights(const double* stencil_xy, int64_t n_s,
                                             const char* op, const double* direction,
                                             int32_t degree, int32_t phs_exponent,
                                             double* weights, double* multipliers);

/* --- assembly -------------------------------------------------------------
 * degrees (optional, length N): selected polynomial degree per interior node,
 * -1 elsewhere.
 * problem_json: {"problem":"section4"} or
 *   {"problem":"nist-peak","alpha":...,"peak_center":[x,y]}.
 * rhs: N doubles.
 */
RBFFD_API rbffd_status rbffd_build_diff_matrix(const rbffd_nodeset* nodes, const char* op,
                                               const double* direction, int32_t g,
                                               int32_t phs_exponent, int32_t adaptive,
                                               int32_t p_min, int32_t p_max, rbffd_matrix** out,
                                               int32_t* degrees);
RBFFD_API rbffd_status rbffd_assemble_system(const rbffd_nodeset* nodes,
                                             const char* problem_json, int32_t g,
                                             int32_t phs_exponent, int32_t adaptive,
                                             int32_t p_min, int32_t p_max, rbffd_matrix** out,
                                             double* rhs, int32_t* degrees);

RBFFD_API int64_t rbffd_matrix_rows(const rbffd_matrix* matrix);
RBFFD_API int64_t rbffd_matrix_cols(const rbffd_matrix* matrix);
RBFFD_API int64_t rbffd_matrix_nnz(const rbffd_matrix* matrix);
/* rows/cols/values: nnz entries each, CSR order. */
RBFFD_API rbffd_status rbffd_matrix_triplets(const rbffd_matrix* matrix, int64_t* rows,
                                             int64_t* cols, double* values);
RBFFD_API void rbffd_matrix_destroy(rbffd_matrix* matrix);

/* solution: N doubles. report may be NULL. */
RBFFD_API rbffd_status rbffd_solve(const rbffd_matrix* matrix, const double* rhs,
                                   double* solution, rbffd_solve_report* report);
RBFFD_API rbffd_status rbffd_error_norms(const double* numeric, const double* exact, int64_t n,
                                         double* max_abs, double* rel_l2,
                                         int32_t* l2_is_absolute);

/* --- config-driven runs ----------------------------------------------------
 * config_json keys: problem, generator:{kind, params...}, N (int or array),
 * g, k, m, adaptive, p_min, p_max, seed, out_dir, alpha, peak_center.
 * Returned strings are owned by the caller; free with rbffd_string_free.
 */
RBFFD_API rbffd_status rbffd_run_solve(const char* config_json, char** record_json);
RBFFD_API rbffd_status rbffd_run_convergence(const char* config_json, char** summary_json);
RBFFD_API void rbffd_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* RBFFD_H */
