#ifndef HAMEIG_H
#define HAMEIG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum HameigStatus {
  HAMEIG_STATUS_OK = 0,
  HAMEIG_STATUS_NULL_POINTER = 1,
  HAMEIG_STATUS_INVALID_ARGUMENT = 2,
  HAMEIG_STATUS_DOMAIN = 3,
  HAMEIG_STATUS_PARSE = 4,
  HAMEIG_STATUS_UNKNOWN_PROBLEM = 5,
  HAMEIG_STATUS_HYPOTHESIS = 6,
  HAMEIG_STATUS_NON_CONVERGENCE = 7,
  HAMEIG_STATUS_IO = 8,
  HAMEIG_STATUS_PANIC = 9,
} HameigStatus;

/**
 * A problem with its bounds for one radius `ρ`.
 */
typedef struct HameigProblem HameigProblem;

/**
 * Certified eigenpairs of a `λ` scan.
 */
typedef struct HameigScan HameigScan;

/**
 * Solution of `u = y + λTu` at one `λ`.
 */
typedef struct HameigSolution HameigSolution;

/**
 * Summary of one eigenpair.
 */
typedef struct HameigPair {
  double lambda_star;
  double residual;
  double norm_gap;
  bool cone_ok;
  bool sliding_mode;
} HameigPair;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread (empty after a success). The
 * pointer stays valid until the next call on this thread.
 */
const char *hameig_last_error(void);

/**
 * `G(t, s)` on `[0, 1]²`.
 */
enum HameigStatus hameig_green_eval(double t, double s, double *value);

/**
 * `φ_N(x) = Σ_{n <= N, q_n < x} 2^-n`.
 */
enum HameigStatus hameig_phi_eval(double x, size_t depth, double *value);

/**
 * Catalog problem `name` for radius `rho`; `depth` truncates `φ`.
 */
enum HameigStatus hameig_problem_from_catalog(const char *name,
                                              double rho,
                                              size_t depth,
                                              struct HameigProblem **problem);

/**
 * Problem from the text of a TOML problem file.
 */
enum HameigStatus hameig_problem_from_toml(const char *text,
                                           double rho,
                                           struct HameigProblem **problem);

/**
 * Releases a problem; null is ignored.
 */
void hameig_problem_free(struct HameigProblem *problem);

/**
 * Runs the hypothesis checks. `lambda_bar <= 0` selects the default `λ̄`.
 */
enum HameigStatus hameig_problem_check(const struct HameigProblem *problem,
                                       double lambda_bar,
                                       bool *all_pass,
                                       double *delta_bar,
                                       double *lambda_bar_out);

/**
 * Solves `u = y + λTu` from `y` on `grid_n` nodes of `[0, 1]`.
 */
enum HameigStatus hameig_solve(const struct HameigProblem *problem,
                               double lambda,
                               size_t grid_n,
                               double tol,
                               struct HameigSolution **solution);

/**
 * Number of grid nodes, history included.
 */
size_t hameig_solution_len(const struct HameigSolution *solution);

/**
 * Copies nodes and values into arrays of length `len` (see `hameig_solution_len`).
 */
enum HameigStatus hameig_solution_copy(const struct HameigSolution *solution,
                                       double *t,
                                       double *u,
                                       size_t len);

/**
 * `‖u - y‖`, residual and iteration count of a solution.
 */
enum HameigStatus hameig_solution_info(const struct HameigSolution *solution,
                                       double *norm,
                                       double *residual,
                                       size_t *iterations);

void hameig_solution_free(struct HameigSolution *solution);

/**
 * Scans `λ ∈ {λ̄ k / lambda_points}` and locates `λ*` with `‖u* - y‖ = ρ`.
 * `lambda_bar <= 0` uses the default from the hypothesis report.
 */
enum HameigStatus hameig_scan(const struct HameigProblem *problem,
                              double lambda_bar,
                              size_t lambda_points,
                              size_t grid_n,
                              struct HameigScan **scan);

size_t hameig_scan_pair_count(const struct HameigScan *scan);

enum HameigStatus hameig_scan_pair(const struct HameigScan *scan,
                                   size_t index,
                                   struct HameigPair *pair);

void hameig_scan_free(struct HameigScan *scan);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HAMEIG_H */
