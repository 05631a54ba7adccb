/* C API of the complex-trajectory semiclassical propagator library.
 *
 * All objects are opaque handles created/destroyed by the functions below.
 * Functions that can fail return a cstraj_status; on failure the thread-local
 * message from cstraj_last_error() describes the problem. Accessors on valid
 * handles do not fail.
 */
#ifndef CSTRAJ_H
#define CSTRAJ_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CSTRAJ_API __declspec(dllexport)
#else
#define CSTRAJ_API __attribute__((visibility("default")))
#endif

typedef enum cstraj_status {
  CSTRAJ_OK = 0,
  CSTRAJ_ERR_INVALID_ARGUMENT = 1,
  CSTRAJ_ERR_NO_CONVERGENCE = 2,
  CSTRAJ_ERR_NON_FINITE = 3,
  CSTRAJ_ERR_CAUSTIC = 4,
  CSTRAJ_ERR_DISCONTINUITY = 5,
  CSTRAJ_ERR_WIDTH_MISMATCH = 6,
  CSTRAJ_ERR_INTERNAL = 7
} cstraj_status;

typedef struct cstraj_model cstraj_model;
typedef struct cstraj_root cstraj_root;
typedef struct cstraj_root_set cstraj_root_set;
typedef struct cstraj_sweep cstraj_sweep;
typedef struct cstraj_oracle cstraj_oracle;

/* Propagator boundary data: initial label (q_i, p_i), final label (q_f, p_f),
 * propagation time T >= 0. */
typedef struct cstraj_labels {
  double q_i, p_i, q_f, p_f, T;
} cstraj_labels;

/* Root-search parameters; fill with cstraj_shooting_defaults() first. */
typedef struct cstraj_shooting_config {
  double delta;      /* convergence threshold on the distance D */
  double eps0;       /* step-factor cap */
  double eps_scale;  /* step factor = eps_scale * D */
  double fd_step;    /* base finite-difference step for grad D */
  int max_iters;
  int n_steps;       /* integrator steps per trajectory */
} cstraj_shooting_config;

CSTRAJ_API const char* cstraj_version(void);

/* Message of the most recent failure on this thread. */
CSTRAJ_API const char* cstraj_last_error(void);

CSTRAJ_API void cstraj_shooting_defaults(cstraj_shooting_config* cfg);

/* --- model ------------------------------------------------------------ */

CSTRAJ_API cstraj_status cstraj_model_create(double hbar, double b,
                                             double lambda, double beta,
                                             cstraj_model** out);
CSTRAJ_API void cstraj_model_destroy(cstraj_model* m);
CSTRAJ_API double cstraj_model_momentum_width(const cstraj_model* m);
CSTRAJ_API double cstraj_model_lambda_eff(const cstraj_model* m);
CSTRAJ_API double cstraj_model_zero_point(const cstraj_model* m);

/* --- root search -------------------------------------------------------- */

/* Gradient-descent search seeded at (seed_x1, seed_p1). */
CSTRAJ_API cstraj_status cstraj_find_root(const cstraj_model* m,
                                          const cstraj_labels* labels,
                                          const cstraj_shooting_config* cfg,
                                          double seed_x1, double seed_p1,
                                          cstraj_root** out);

/* Continuation in T: solves the ascending grid T_grid[0..n_t), each point
 * seeded with the previous root, the first with (q_i, p_i). On partial
 * convergence returns CSTRAJ_OK with *out holding the completed prefix and
 * sets *truncated_at to the index of the first failed grid point (n_t when
 * complete). */
CSTRAJ_API cstraj_status cstraj_find_root_continuation(
    const cstraj_model* m, const cstraj_labels* labels,
    const cstraj_shooting_config* cfg, const double* T_grid, size_t n_t,
    cstraj_root_set** out, size_t* truncated_at);

/* Independent searches from n_seeds (x1, p1) pairs, deduplicated. */
CSTRAJ_API cstraj_status cstraj_multi_start(const cstraj_model* m,
                                            const cstraj_labels* labels,
                                            const cstraj_shooting_config* cfg,
                                            const double* seeds, size_t n_seeds,
                                            cstraj_root_set** out,
                                            int* n_failed);

CSTRAJ_API void cstraj_root_destroy(cstraj_root* r);
CSTRAJ_API double cstraj_root_x1(const cstraj_root* r);
CSTRAJ_API double cstraj_root_p1(const cstraj_root* r);
CSTRAJ_API double cstraj_root_distance(const cstraj_root* r);
CSTRAJ_API int cstraj_root_iterations(const cstraj_root* r);
CSTRAJ_API size_t cstraj_root_point_count(const cstraj_root* r);
CSTRAJ_API void cstraj_root_point(const cstraj_root* r, size_t i, double* t,
                                  double* x1, double* p1, double* x2,
                                  double* p2);
/* Primitive period of the (x1, p1) projection; *has_period = 0 when no full
 * turn fits in [0, T]. */
CSTRAJ_API void cstraj_root_period(const cstraj_root* r, double* period,
                                   int* has_period);

CSTRAJ_API void cstraj_root_set_destroy(cstraj_root_set* s);
CSTRAJ_API size_t cstraj_root_set_size(const cstraj_root_set* s);
/* Borrowed reference, valid while the set lives; do not destroy. */
CSTRAJ_API const cstraj_root* cstraj_root_set_get(const cstraj_root_set* s,
                                                  size_t i);

/* --- semiclassical propagator ------------------------------------------- */

/* Semiclassical propagator over a uniform T grid of n_t points spanning
 * [0, t_max] (n_t >= 2, or n_t = 1 with t_max = 0), built from a single-root
 * continuation plus optional extra seed families (seeds = n_seeds (x1, p1)
 * pairs). Partial sweeps are returned with cstraj_sweep_truncated() set. */
CSTRAJ_API cstraj_status cstraj_scsp_sweep(const cstraj_model* m,
                                           const cstraj_labels* labels,
                                           double t_max, size_t n_t,
                                           const cstraj_shooting_config* cfg,
                                           const double* seeds, size_t n_seeds,
                                           cstraj_sweep** out);
CSTRAJ_API void cstraj_sweep_destroy(cstraj_sweep* s);
CSTRAJ_API size_t cstraj_sweep_size(const cstraj_sweep* s);
CSTRAJ_API void cstraj_sweep_sample(const cstraj_sweep* s, size_t i, double* T,
                                    double* re, double* im);
CSTRAJ_API int cstraj_sweep_truncated(const cstraj_sweep* s);
CSTRAJ_API const char* cstraj_sweep_truncation_reason(const cstraj_sweep* s);

/* --- exact propagator --------------------------------------------------- */

/* Diagonalizes H in an oscillator basis of size N. check_convergence != 0
 * additionally diagonalizes at 2N to count converged levels (used as the
 * default level cutoff). */
CSTRAJ_API cstraj_status cstraj_oracle_create(const cstraj_model* m, size_t N,
                                              int check_convergence,
                                              cstraj_oracle** out);
CSTRAJ_API void cstraj_oracle_destroy(cstraj_oracle* o);
CSTRAJ_API size_t cstraj_oracle_levels(const cstraj_oracle* o);
CSTRAJ_API double cstraj_oracle_energy(const cstraj_oracle* o, size_t n);
/* n_levels = 0 uses the converged-level default. truncation_warning (may be
 * NULL) flags a non-negligible basis tail. */
CSTRAJ_API cstraj_status cstraj_oracle_csp(const cstraj_oracle* o,
                                           const cstraj_labels* labels,
                                           size_t n_levels, double* re,
                                           double* im,
                                           int* truncation_warning);

/* Closed-form harmonic propagator (beta = 0, width-matched b). */
CSTRAJ_API cstraj_status cstraj_harmonic_csp(const cstraj_model* m,
                                             const cstraj_labels* labels,
                                             double* re, double* im);

#ifdef __cplusplus
}
#endif

#endif /* CSTRAJ_H */
