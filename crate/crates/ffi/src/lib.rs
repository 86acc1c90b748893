//! C ABI for the robust factor-model estimator.
//!
//! Matrices cross the boundary as row-major `n * n` buffers of `double`.
//! Every fallible call returns an [`RfStatus`]; on failure a message is kept
//! per thread and can be read with [`rf_last_error`]. Handles are opaque and
//! must be released with their `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use robust_factor::datagen::{empirical_covariance, CovarianceCenter, SampleSet};
use robust_factor::distances::{AmbiguityBall, DistanceError, DistanceKind};
use robust_factor::linalg::{LinalgError, SymmetricMatrix};
use robust_factor::oracles::{lmo, OracleError};
use robust_factor::projection::{dykstra_project, DEFAULT_DYKSTRA_MAX_ITERS, DEFAULT_DYKSTRA_TOL};
use robust_factor::solver::{solve, FactorModelSolution, SolverConfig, SolverError, SolverStatus, Stepsize};
use thiserror::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotSymmetric = 4,
    NotPsd = 5,
    NumericalFailure = 6,
    SolverFailed = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfDistance {
    Frobenius = 0,
    Kl = 1,
    Gelbrich = 2,
}

impl From<RfDistance> for DistanceKind {
    fn from(d: RfDistance) -> Self {
        match d {
            RfDistance::Frobenius => DistanceKind::Frobenius,
            RfDistance::Kl => DistanceKind::Kl,
            RfDistance::Gelbrich => DistanceKind::Gelbrich,
        }
    }
}

/// Which matrix of a solution to copy out.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfMatrix {
    /// Low-rank part `L`.
    LowRank = 0,
    /// Diagonal part `D`, as a full matrix.
    Diagonal = 1,
    /// `Sigma*`, the worst-case covariance at the reported multiplier.
    Sigma = 2,
    /// The reported multiplier.
    Multiplier = 3,
}

/// Solver options; start from [`rf_solver_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfSolverOptions {
    /// Step constant `c`.
    pub step: f64,
    /// `true` for `c / sqrt(t)`, `false` for a constant step.
    pub diminishing: bool,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub use_stopping_rule: bool,
    pub dykstra_tol: f64,
    pub dykstra_max_iters: usize,
    pub checkpoint_every: usize,
    pub tol_cs: f64,
}

impl From<&RfSolverOptions> for SolverConfig {
    fn from(o: &RfSolverOptions) -> Self {
        SolverConfig {
            stepsize: if o.diminishing { Stepsize::Diminishing(o.step) } else { Stepsize::Constant(o.step) },
            max_iters: o.max_iters,
            rel_tol: o.rel_tol,
            dykstra_tol: o.dykstra_tol,
            dykstra_max_iters: o.dykstra_max_iters,
            checkpoint_every: o.checkpoint_every,
            use_stopping_rule: o.use_stopping_rule,
            record_timing: false,
            tol_cs: o.tol_cs,
        }
    }
}

/// Opaque ambiguity ball.
pub struct RfBall(AmbiguityBall);

/// Opaque solver result.
pub struct RfSolution(FactorModelSolution);

#[derive(Debug, Error)]
enum FfiError {
    #[error("{0} is null")]
    Null(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error("buffer holds {got} values, {needed} needed")]
    BufferTooSmall { needed: usize, got: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

fn linalg_status(e: &LinalgError) -> RfStatus {
    match e {
        LinalgError::NotSymmetric { .. } => RfStatus::NotSymmetric,
        LinalgError::NotSquare { .. } | LinalgError::DimensionMismatch { .. } => RfStatus::DimensionMismatch,
        LinalgError::EmptyMatrix | LinalgError::NonFinite { .. } => RfStatus::InvalidArgument,
        LinalgError::NoConvergence { .. } | LinalgError::Domain { .. } => RfStatus::NumericalFailure,
    }
}

fn distance_status(e: &DistanceError) -> RfStatus {
    match e {
        DistanceError::Linalg(l) => linalg_status(l),
        DistanceError::DimensionMismatch { .. } => RfStatus::DimensionMismatch,
        DistanceError::SingularReference { .. } | DistanceError::Indefinite { .. } => RfStatus::NotPsd,
        DistanceError::InvalidRadius(_) | DistanceError::NegativeArgument(_) => RfStatus::InvalidArgument,
    }
}

impl FfiError {
    fn status(&self) -> RfStatus {
        match self {
            FfiError::Null(_) => RfStatus::NullPointer,
            FfiError::Invalid(_) => RfStatus::InvalidArgument,
            FfiError::BufferTooSmall { .. } => RfStatus::BufferTooSmall,
            FfiError::Linalg(e) => linalg_status(e),
            FfiError::Distance(e) => distance_status(e),
            FfiError::Oracle(OracleError::Distance(e)) => distance_status(e),
            FfiError::Oracle(OracleError::Linalg(e)) => linalg_status(e),
            FfiError::Oracle(OracleError::DimensionMismatch { .. }) => RfStatus::DimensionMismatch,
            FfiError::Oracle(_) => RfStatus::NumericalFailure,
            FfiError::Solver(SolverError::InvalidConfig(_) | SolverError::InfeasibleStart(_)) => {
                RfStatus::InvalidArgument
            }
            FfiError::Solver(SolverError::DimensionMismatch { .. }) => RfStatus::DimensionMismatch,
            FfiError::Solver(_) => RfStatus::SolverFailed,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_last_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), FfiError>) -> RfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RfStatus::Ok,
        Ok(Err(e)) => {
            set_last_error(e.to_string());
            e.status()
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            RfStatus::Panic
        }
    }
}

fn check_dim(n: usize) -> Result<usize, FfiError> {
    if n == 0 {
        return Err(FfiError::Invalid("dimension must be positive".into()));
    }
    n.checked_mul(n).ok_or_else(|| FfiError::Invalid(format!("dimension {n} is too large")))
}

/// # Safety
/// `data` must be null or point to `len` readable doubles.
unsafe fn input<'a>(data: *const f64, len: usize, name: &'static str) -> Result<&'a [f64], FfiError> {
    if data.is_null() {
        return Err(FfiError::Null(name));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

/// # Safety
/// `data` must be null or point to `n * n` readable doubles.
unsafe fn read_matrix(data: *const f64, n: usize, name: &'static str) -> Result<SymmetricMatrix, FfiError> {
    let len = check_dim(n)?;
    let flat = input(data, len, name)?;
    let rows: Vec<Vec<f64>> = flat.chunks(n).map(<[f64]>::to_vec).collect();
    Ok(SymmetricMatrix::from_rows(&rows)?)
}

/// # Safety
/// `out` must be null or point to `m.dim()^2` writable doubles.
unsafe fn write_matrix(m: &SymmetricMatrix, out: *mut f64) {
    if !out.is_null() {
        ptr::copy_nonoverlapping(m.as_slice().as_ptr(), out, m.as_slice().len());
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rf_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string has an interior NUL"),
    };
    VERSION.as_ptr()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// NUL-terminated) and returns the full message length excluding the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rf_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

#[no_mangle]
pub extern "C" fn rf_solver_options_default() -> RfSolverOptions {
    let c = SolverConfig::default();
    let (step, diminishing) = match c.stepsize {
        Stepsize::Diminishing(s) => (s, true),
        Stepsize::Constant(s) => (s, false),
    };
    RfSolverOptions {
        step,
        diminishing,
        max_iters: c.max_iters,
        rel_tol: c.rel_tol,
        use_stopping_rule: c.use_stopping_rule,
        dykstra_tol: c.dykstra_tol,
        dykstra_max_iters: c.dykstra_max_iters,
        checkpoint_every: c.checkpoint_every,
        tol_cs: c.tol_cs,
    }
}

/// Builds the ball `{ Sigma >= 0 : dist(Sigma, center) <= radius }`.
///
/// # Safety
/// `center` must point to `n * n` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_ball_new(
    center: *const f64,
    n: usize,
    radius: f64,
    distance: RfDistance,
    out: *mut *mut RfBall,
) -> RfStatus {
    guard(|| {
        if out.is_null() {
            return Err(FfiError::Null("out"));
        }
        *out = ptr::null_mut();
        let c = read_matrix(center, n, "center")?;
        let ball = AmbiguityBall::new(c, radius, distance.into())?;
        *out = Box::into_raw(Box::new(RfBall(ball)));
        Ok(())
    })
}

/// # Safety
/// `ball` must be null or a handle from [`rf_ball_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rf_ball_free(ball: *mut RfBall) {
    if !ball.is_null() {
        drop(Box::from_raw(ball));
    }
}

/// Dimension of the ball, or 0 for a null handle.
///
/// # Safety
/// `ball` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_ball_dim(ball: *const RfBall) -> usize {
    ball.as_ref().map_or(0, |b| b.0.dim())
}

/// Distance from `sigma` to the ball's center.
///
/// # Safety
/// `ball` must be a live handle, `sigma` must point to `n * n` doubles and
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rf_ball_distance(ball: *const RfBall, sigma: *const f64, out: *mut f64) -> RfStatus {
    guard(|| {
        let ball = ball.as_ref().ok_or(FfiError::Null("ball"))?;
        if out.is_null() {
            return Err(FfiError::Null("out"));
        }
        let s = read_matrix(sigma, ball.0.dim(), "sigma")?;
        *out = ball.0.distance(&s)?;
        Ok(())
    })
}

/// Minimizes `<lambda, Sigma>` over the ball. Writes the minimizer to
/// `out_sigma` (`n * n`, may be null), the optimal value to `out_value` and
/// the constraint multiplier to `out_multiplier` (each may be null).
///
/// # Safety
/// Pointers must be null or valid for the sizes above.
#[no_mangle]
pub unsafe extern "C" fn rf_lmo(
    ball: *const RfBall,
    lambda: *const f64,
    out_sigma: *mut f64,
    out_value: *mut f64,
    out_multiplier: *mut f64,
) -> RfStatus {
    guard(|| {
        let ball = ball.as_ref().ok_or(FfiError::Null("ball"))?;
        let lam = read_matrix(lambda, ball.0.dim(), "lambda")?;
        let res = lmo(&lam, &ball.0)?;
        write_matrix(&res.minimizer, out_sigma);
        if !out_value.is_null() {
            *out_value = res.dual_value;
        }
        if !out_multiplier.is_null() {
            *out_multiplier = res.multiplier;
        }
        Ok(())
    })
}

/// Projects `lambda` onto `{ diag <= 0 } ∩ { Lambda <= I }` with default
/// tolerances; `out` receives `n * n` doubles.
///
/// # Safety
/// `lambda` must point to `n * n` readable and `out` to `n * n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rf_project(lambda: *const f64, n: usize, out: *mut f64) -> RfStatus {
    guard(|| {
        let lam = read_matrix(lambda, n, "lambda")?;
        if out.is_null() {
            return Err(FfiError::Null("out"));
        }
        let state = dykstra_project(&lam, DEFAULT_DYKSTRA_MAX_ITERS, DEFAULT_DYKSTRA_TOL)?;
        write_matrix(&state.primal, out);
        Ok(())
    })
}

/// `(1/N) sum (x - mu)(x - mu)^T` over `count` row-major samples of length
/// `n`; `mu` is the sample mean, or zero when `zero_mean` is set.
///
/// # Safety
/// `samples` must point to `count * n` doubles and `out` to `n * n`.
#[no_mangle]
pub unsafe extern "C" fn rf_empirical_covariance(
    samples: *const f64,
    count: usize,
    n: usize,
    zero_mean: bool,
    out: *mut f64,
) -> RfStatus {
    guard(|| {
        check_dim(n)?;
        let len = count.checked_mul(n).ok_or_else(|| FfiError::Invalid("sample buffer too large".into()))?;
        let flat = input(samples, len, "samples")?;
        if out.is_null() {
            return Err(FfiError::Null("out"));
        }
        let set = SampleSet::new(flat.chunks(n).map(<[f64]>::to_vec).collect())
            .map_err(|e| FfiError::Invalid(e.to_string()))?;
        let center = if zero_mean { CovarianceCenter::Zero } else { CovarianceCenter::SampleMean };
        write_matrix(&empirical_covariance(&set, center), out);
        Ok(())
    })
}

/// Runs the solver from the zero multiplier. `options` may be null for
/// defaults.
///
/// # Safety
/// `ball` must be a live handle, `options` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rf_solve(
    ball: *const RfBall,
    options: *const RfSolverOptions,
    out: *mut *mut RfSolution,
) -> RfStatus {
    guard(|| {
        if out.is_null() {
            return Err(FfiError::Null("out"));
        }
        *out = ptr::null_mut();
        let ball = ball.as_ref().ok_or(FfiError::Null("ball"))?;
        let config = options.as_ref().map_or_else(SolverConfig::default, SolverConfig::from);
        let (solution, _) = solve(&ball.0, &config, None)?;
        *out = Box::into_raw(Box::new(RfSolution(solution)));
        Ok(())
    })
}

/// # Safety
/// `solution` must be null or a handle from [`rf_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rf_solution_free(solution: *mut RfSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Dimension of the solution, or 0 for a null handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_solution_dim(solution: *const RfSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.0.sigma.dim())
}

/// Dual objective `<Lambda, Sigma*>`, a lower bound on the optimal trace;
/// NaN for a null handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_solution_objective(solution: *const RfSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.0.objective)
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_solution_iterations(solution: *const RfSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.0.iterations)
}

/// Whether the stopping rule fired before the iteration limit.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_solution_converged(solution: *const RfSolution) -> bool {
    solution.as_ref().is_some_and(|s| s.0.status == SolverStatus::Converged)
}

/// `||L + D - Sigma*||_F`; NaN for a null handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_solution_recovery_residual(solution: *const RfSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.0.recovery_residual)
}

/// A-priori suboptimality bound after the iterations run; NaN for a null
/// handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_solution_bound_gap(solution: *const RfSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.0.bound.value)
}

/// Copies one of the solution matrices into `buf`, which must hold at least
/// `n * n` doubles.
///
/// # Safety
/// `solution` must be a live handle and `buf` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rf_solution_matrix(
    solution: *const RfSolution,
    which: RfMatrix,
    buf: *mut f64,
    len: usize,
) -> RfStatus {
    guard(|| {
        let s = &solution.as_ref().ok_or(FfiError::Null("solution"))?.0;
        if buf.is_null() {
            return Err(FfiError::Null("buf"));
        }
        let m = match which {
            RfMatrix::LowRank => &s.l,
            RfMatrix::Diagonal => &s.d,
            RfMatrix::Sigma => &s.sigma,
            RfMatrix::Multiplier => &s.lambda,
        };
        let needed = m.as_slice().len();
        if len < needed {
            return Err(FfiError::BufferTooSmall { needed, got: len });
        }
        write_matrix(m, buf);
        Ok(())
    })
}
