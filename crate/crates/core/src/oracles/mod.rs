//! Linear minimization oracles `O(Lambda) = argmin { <Lambda, Sigma> : Sigma in ball }`.
//!
//! Each oracle reduces the matrix problem to a one-dimensional search over
//! the multiplier `gamma` of the distance constraint. The search interval is
//! reported alongside the result so callers can audit it.

mod bruteforce;
mod frobenius;
mod gelbrich;
mod kl;
pub mod scalar;

use thiserror::Error;

pub use bruteforce::{lmo_bruteforce, BruteForceConfig};
pub use frobenius::lmo_frobenius;
pub use gelbrich::lmo_gelbrich;
pub use kl::lmo_kl;

use crate::distances::{kl_eigen_radius, AmbiguityBall, DistanceError, DistanceKind};
use crate::linalg::{eig_sym, tol_pd, LinalgError, SymmetricMatrix};

/// `||Lambda||_F` at or below which the oracle input is treated as zero.
pub const TOL_ZERO: f64 = 1e-12;

/// Relative tolerance on the multiplier `gamma`.
pub const GAMMA_RTOL: f64 = 1e-12;

const MAX_SCALAR_ITERS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("oracle for {expected} called with a {got} ball")]
    WrongKind { expected: DistanceKind, got: DistanceKind },
    #[error("dimension mismatch: multiplier is {lambda}x{lambda}, ball is {ball}x{ball}")]
    DimensionMismatch { lambda: usize, ball: usize },
    #[error("{kind} multiplier bracket is empty: ({lo:e}, {hi:e}]")]
    EmptyBracket { kind: DistanceKind, lo: f64, hi: f64 },
    #[error("{kind} multiplier not bracketed on ({lo:e}, {hi:e}]")]
    NotBracketed { kind: DistanceKind, lo: f64, hi: f64 },
}

/// How the oracle resolved the distance constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatus {
    /// Constraint active; `multiplier` lies in `bracket`.
    Active,
    /// The minimizer sits strictly inside the ball (only possible for
    /// `Lambda >= 0`); `multiplier` is 0.
    Inactive,
    /// `radius == 0` or `||Lambda||_F <= TOL_ZERO`: the center is returned and
    /// `multiplier` is a 0 sentinel.
    Degenerate,
}

/// Half-open multiplier interval `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn contains(&self, gamma: f64) -> bool {
        self.lo < gamma && gamma <= self.hi
    }
}

#[derive(Debug, Clone)]
pub struct OracleOutput {
    pub minimizer: SymmetricMatrix,
    pub multiplier: f64,
    /// `d(Lambda) = <Lambda, minimizer>`.
    pub dual_value: f64,
    /// Lagrangian dual evaluated at `multiplier`; never above `dual_value`
    /// beyond roundoff.
    pub lagrangian_value: f64,
    /// Interval actually searched.
    pub bracket: Bracket,
    /// Interval printed with the closed form (see [`stated_bracket`]).
    pub stated_bracket: Bracket,
    pub scalar_solver_iters: usize,
    pub status: OracleStatus,
}

impl OracleOutput {
    pub(crate) fn degenerate(lambda: &SymmetricMatrix, ball: &AmbiguityBall, stated: Bracket) -> Self {
        let minimizer = ball.center().clone();
        let dual_value = lambda.inner(&minimizer);
        Self {
            minimizer,
            multiplier: 0.0,
            dual_value,
            lagrangian_value: dual_value,
            bracket: Bracket { lo: 0.0, hi: 0.0 },
            stated_bracket: stated,
            scalar_solver_iters: 0,
            status: OracleStatus::Degenerate,
        }
    }
}

/// Solves the LMO for whichever distance the ball uses.
pub fn lmo(lambda: &SymmetricMatrix, ball: &AmbiguityBall) -> Result<OracleOutput, OracleError> {
    match ball.kind() {
        DistanceKind::Frobenius => lmo_frobenius(lambda, ball),
        DistanceKind::Kl => lmo_kl(lambda, ball),
        DistanceKind::Gelbrich => lmo_gelbrich(lambda, ball),
    }
}

pub(crate) fn check_input(
    lambda: &SymmetricMatrix,
    ball: &AmbiguityBall,
    expected: DistanceKind,
) -> Result<(), OracleError> {
    if ball.kind() != expected {
        return Err(OracleError::WrongKind { expected, got: ball.kind() });
    }
    if lambda.dim() != ball.dim() {
        return Err(OracleError::DimensionMismatch { lambda: lambda.dim(), ball: ball.dim() });
    }
    Ok(())
}

/// The multiplier interval exactly as printed next to each closed form:
///
/// * Frobenius: `(0, ||Lambda||_F]`
/// * KL: `(max{0, 2 lambda_max(-S Lambda S)}, ||S Lambda S||_* c(eps)]` with
///   `S = center^{1/2}` and `c(eps) = sqrt(6/eps)` for `eps <= 1/24`,
///   `6 + 1/(4 eps)` otherwise
/// * Gelbrich: `(lambda_max(-Lambda), ||Lambda||_F (2 lambda_max(center)^{1/2} + eps)]`
///
/// The Frobenius and Gelbrich upper ends are only guaranteed for
/// `eps >= 1`; the oracles search wider intervals that hold for every
/// radius (see each oracle).
pub fn stated_bracket(lambda: &SymmetricMatrix, ball: &AmbiguityBall) -> Result<Bracket, OracleError> {
    let eps = ball.radius();
    match ball.kind() {
        DistanceKind::Frobenius => Ok(Bracket { lo: 0.0, hi: lambda.frobenius_norm() }),
        DistanceKind::Kl => {
            let m = ball.center_sqrt().sandwich(lambda);
            let eig = eig_sym(&m)?;
            let nuclear: f64 = eig.eigenvalues().iter().map(|v| v.abs()).sum();
            Ok(Bracket { lo: (-2.0 * eig.lambda_min()).max(0.0), hi: nuclear * kl_gamma_factor(eps) })
        }
        DistanceKind::Gelbrich => {
            let eig = eig_sym(lambda)?;
            let lmax = ball.center_eig().lambda_max().max(0.0);
            Ok(Bracket {
                lo: -eig.lambda_min(),
                hi: lambda.frobenius_norm() * (2.0 * lmax.sqrt() + eps),
            })
        }
    }
}

/// `sqrt(6/eps)` for `eps <= 1/24`, `6 + 1/(4 eps)` otherwise.
pub(crate) fn kl_gamma_factor(eps: f64) -> f64 {
    if eps <= 1.0 / 24.0 {
        (6.0 / eps).sqrt()
    } else {
        6.0 + 1.0 / (4.0 * eps)
    }
}

/// Upper bound on the Lipschitz constant of `d(Lambda)`, i.e. on
/// `max { ||Sigma||_F : Sigma in ball }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzBound {
    pub value: f64,
    pub kind: DistanceKind,
}

pub fn lipschitz_bound(ball: &AmbiguityBall) -> LipschitzBound {
    let eps = ball.radius();
    let center_norm = ball.center().frobenius_norm();
    let n = ball.dim() as f64;
    let value = match ball.kind() {
        DistanceKind::Frobenius => eps + center_norm,
        DistanceKind::Kl => {
            let spread = if eps <= 1.0 / 24.0 { n * (6.0 * eps).sqrt() } else { n * kl_eigen_radius(eps) };
            (spread + 1.0) * center_norm
        }
        DistanceKind::Gelbrich => {
            let lmax = ball.center_eig().lambda_max().max(0.0);
            (2.0 * lmax.sqrt() + eps) * eps + center_norm
        }
    };
    LipschitzBound { value, kind: ball.kind() }
}

/// Symmetrized copy with tiny negative eigenvalues (above `-tol_pd`) clamped.
pub(crate) fn clean_psd(sigma: SymmetricMatrix) -> Result<SymmetricMatrix, LinalgError> {
    let eig = eig_sym(&sigma)?;
    let lmin = eig.lambda_min();
    if lmin < 0.0 && lmin > -tol_pd(eig.lambda_max()) {
        Ok(eig.reconstruct(|l| l.max(0.0)))
    } else {
        Ok(sigma)
    }
}

/// `P center P` with `P` the projector onto the (numerical) null space of a
/// PSD `lambda`: the limit of every oracle's minimizer as `gamma -> 0+`.
pub(crate) fn null_space_compression(
    lambda: &SymmetricMatrix,
    ball: &AmbiguityBall,
) -> Result<Option<SymmetricMatrix>, LinalgError> {
    let eig = eig_sym(lambda)?;
    let tol = tol_pd(eig.lambda_max().abs()) * 1e2;
    if eig.lambda_min() < -tol {
        return Ok(None);
    }
    let weights: Vec<f64> = eig.eigenvalues().iter().map(|&l| if l.abs() <= tol { 1.0 } else { 0.0 }).collect();
    let p = eig.reconstruct_with_weights(&weights);
    Ok(Some(p.sandwich(ball.center())))
}
