#ifndef ROBUST_FACTOR_H
#define ROBUST_FACTOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>

/**
 * Result code of every fallible call.
 */
typedef enum RfStatus {
  RF_STATUS_OK = 0,
  RF_STATUS_NULL_POINTER = 1,
  RF_STATUS_INVALID_ARGUMENT = 2,
  RF_STATUS_DIMENSION_MISMATCH = 3,
  RF_STATUS_NOT_SYMMETRIC = 4,
  RF_STATUS_NOT_PSD = 5,
  RF_STATUS_NUMERICAL_FAILURE = 6,
  RF_STATUS_SOLVER_FAILED = 7,
  RF_STATUS_BUFFER_TOO_SMALL = 8,
  RF_STATUS_PANIC = 9,
} RfStatus;

typedef enum RfDistance {
  RF_DISTANCE_FROBENIUS = 0,
  RF_DISTANCE_KL = 1,
  RF_DISTANCE_GELBRICH = 2,
} RfDistance;

/**
 * Which matrix of a solution to copy out.
 */
typedef enum RfMatrix {
  /**
   * Low-rank part `L`.
   */
  RF_MATRIX_LOW_RANK = 0,
  /**
   * Diagonal part `D`, as a full matrix.
   */
  RF_MATRIX_DIAGONAL = 1,
  /**
   * `Sigma*`, the worst-case covariance at the reported multiplier.
   */
  RF_MATRIX_SIGMA = 2,
  /**
   * The reported multiplier.
   */
  RF_MATRIX_MULTIPLIER = 3,
} RfMatrix;

/**
 * Opaque ambiguity ball.
 */
typedef struct RfBall RfBall;

/**
 * Opaque solver result.
 */
typedef struct RfSolution RfSolution;

/**
 * Solver options; start from [`rf_solver_options_default`].
 */
typedef struct RfSolverOptions {
  /**
   * Step constant `c`.
   */
  double step;
  /**
   * `true` for `c / sqrt(t)`, `false` for a constant step.
   */
  bool diminishing;
  size_t max_iters;
  double rel_tol;
  bool use_stopping_rule;
  double dykstra_tol;
  size_t dykstra_max_iters;
  size_t checkpoint_every;
  double tol_cs;
} RfSolverOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rf_version(void);

/**
 * Copies the calling thread's last error message into `buf` (truncated and
 * NUL-terminated) and returns the full message length excluding the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t rf_last_error(char *buf, size_t len);

struct RfSolverOptions rf_solver_options_default(void);

/**
 * Builds the ball `{ Sigma >= 0 : dist(Sigma, center) <= radius }`.
 *
 * # Safety
 * `center` must point to `n * n` doubles; `out` must be a valid pointer.
 */
enum RfStatus rf_ball_new(const double *center,
                          size_t n,
                          double radius,
                          enum RfDistance distance,
                          struct RfBall **out);

/**
 * # Safety
 * `ball` must be null or a handle from [`rf_ball_new`] not yet freed.
 */
void rf_ball_free(struct RfBall *ball);

/**
 * Dimension of the ball, or 0 for a null handle.
 *
 * # Safety
 * `ball` must be null or a live handle.
 */
size_t rf_ball_dim(const struct RfBall *ball);

/**
 * Distance from `sigma` to the ball's center.
 *
 * # Safety
 * `ball` must be a live handle, `sigma` must point to `n * n` doubles and
 * `out` must be valid.
 */
enum RfStatus rf_ball_distance(const struct RfBall *ball, const double *sigma, double *out);

/**
 * Minimizes `<lambda, Sigma>` over the ball. Writes the minimizer to
 * `out_sigma` (`n * n`, may be null), the optimal value to `out_value` and
 * the constraint multiplier to `out_multiplier` (each may be null).
 *
 * # Safety
 * Pointers must be null or valid for the sizes above.
 */
enum RfStatus rf_lmo(const struct RfBall *ball,
                     const double *lambda,
                     double *out_sigma,
                     double *out_value,
                     double *out_multiplier);

/**
 * Projects `lambda` onto `{ diag <= 0 } ∩ { Lambda <= I }` with default
 * tolerances; `out` receives `n * n` doubles.
 *
 * # Safety
 * `lambda` must point to `n * n` readable and `out` to `n * n` writable doubles.
 */
enum RfStatus rf_project(const double *lambda, size_t n, double *out);

/**
 * `(1/N) sum (x - mu)(x - mu)^T` over `count` row-major samples of length
 * `n`; `mu` is the sample mean, or zero when `zero_mean` is set.
 *
 * # Safety
 * `samples` must point to `count * n` doubles and `out` to `n * n`.
 */
enum RfStatus rf_empirical_covariance(const double *samples,
                                      size_t count,
                                      size_t n,
                                      bool zero_mean,
                                      double *out);

/**
 * Runs the solver from the zero multiplier. `options` may be null for
 * defaults.
 *
 * # Safety
 * `ball` must be a live handle, `options` null or valid, `out` valid.
 */
enum RfStatus rf_solve(const struct RfBall *ball,
                       const struct RfSolverOptions *options,
                       struct RfSolution **out);

/**
 * # Safety
 * `solution` must be null or a handle from [`rf_solve`] not yet freed.
 */
void rf_solution_free(struct RfSolution *solution);

/**
 * Dimension of the solution, or 0 for a null handle.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t rf_solution_dim(const struct RfSolution *solution);

/**
 * Dual objective `<Lambda, Sigma*>`, a lower bound on the optimal trace;
 * NaN for a null handle.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
double rf_solution_objective(const struct RfSolution *solution);

/**
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t rf_solution_iterations(const struct RfSolution *solution);

/**
 * Whether the stopping rule fired before the iteration limit.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
bool rf_solution_converged(const struct RfSolution *solution);

/**
 * `||L + D - Sigma*||_F`; NaN for a null handle.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
double rf_solution_recovery_residual(const struct RfSolution *solution);

/**
 * A-priori suboptimality bound after the iterations run; NaN for a null
 * handle.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
double rf_solution_bound_gap(const struct RfSolution *solution);

/**
 * Copies one of the solution matrices into `buf`, which must hold at least
 * `n * n` doubles.
 *
 * # Safety
 * `solution` must be a live handle and `buf` must point to `len` doubles.
 */
enum RfStatus rf_solution_matrix(const struct RfSolution *solution,
                                 enum RfMatrix which,
                                 double *buf,
                                 size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROBUST_FACTOR_H */
