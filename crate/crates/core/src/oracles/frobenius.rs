//! Frobenius ball: `Sigma*(gamma) = Pi_psd(center - Lambda / (2 gamma))`.
//!
//! The search runs in `t = 1 / (2 gamma)`. With `X(t) = center - t Lambda`
//! and `N(t)` the negative spectral part of `X(t)`, the minimizer is
//! `X(t) - N(t)` and its squared distance to the center is
//! `psi(t) = ||t Lambda + N(t)||_F^2`, nondecreasing in `t`.
//! Non-expansiveness of the PSD projection gives `psi(eps / ||Lambda||_F) <= eps^2`,
//! so `gamma* <= ||Lambda||_F / (2 eps)` for every radius.

use super::scalar::brent_root;
use super::{
    check_input, null_space_compression, Bracket, OracleError, OracleOutput, OracleStatus, GAMMA_RTOL,
    MAX_SCALAR_ITERS, TOL_ZERO,
};
use crate::distances::{AmbiguityBall, DistanceKind};
use std::cell::RefCell;

use crate::linalg::{eig_sym, eig_sym_warm, LinalgError, SpectralDecomposition, SymmetricMatrix};

const MAX_DOUBLINGS: usize = 200;

struct Eval {
    minimizer: SymmetricMatrix,
    /// `psi(t) - eps^2`.
    gap: f64,
    clamped: bool,
}

/// Last eigenbasis seen, reused as the starting point for the next `t`.
type Basis = RefCell<Option<SpectralDecomposition>>;

fn evaluate(
    lambda: &SymmetricMatrix,
    center: &SymmetricMatrix,
    eps: f64,
    t: f64,
    basis: &Basis,
) -> Result<Eval, LinalgError> {
    let x = center.add_scaled(-t, lambda);
    let eig = match basis.borrow().as_ref() {
        Some(prev) => eig_sym_warm(&x, prev)?,
        None => eig_sym(&x)?,
    };
    let out = if eig.lambda_min() >= 0.0 {
        let step = lambda.scale(t);
        Eval { gap: step.inner(&step) - eps * eps, minimizer: x, clamped: false }
    } else {
        let neg = eig.reconstruct(|l| l.min(0.0));
        let diff = lambda.scale(t).add(&neg);
        Eval { gap: diff.inner(&diff) - eps * eps, minimizer: x.sub(&neg), clamped: true }
    };
    *basis.borrow_mut() = Some(eig);
    Ok(out)
}

/// Frobenius-ball LMO.
pub fn lmo_frobenius(lambda: &SymmetricMatrix, ball: &AmbiguityBall) -> Result<OracleOutput, OracleError> {
    check_input(lambda, ball, DistanceKind::Frobenius)?;
    let eps = ball.radius();
    let norm = lambda.frobenius_norm();
    let stated = Bracket { lo: 0.0, hi: norm };
    if eps == 0.0 || norm <= TOL_ZERO {
        return Ok(OracleOutput::degenerate(lambda, ball, stated));
    }
    let center = ball.center();
    let bracket = Bracket { lo: 0.0, hi: norm / (2.0 * eps) };
    let not_bracketed = |t_hi: f64| OracleError::NotBracketed {
        kind: DistanceKind::Frobenius,
        lo: 1.0 / (2.0 * t_hi),
        hi: bracket.hi,
    };

    let t_lo = eps / norm;
    let basis = Basis::default();
    let first = evaluate(lambda, center, eps, t_lo, &basis)?;
    // No clamping at t_lo means the constraint is already tight there.
    if !first.clamped || first.gap >= 0.0 {
        return Ok(active(lambda, ball, first.minimizer, bracket.hi, bracket, stated, 0));
    }

    let mut t_hi = t_lo;
    let mut hi_gap = first.gap;
    let mut doublings = 0;
    while hi_gap < 0.0 {
        if doublings == MAX_DOUBLINGS {
            if let Some(sigma0) = null_space_compression(lambda, ball)? {
                if ball.distance(&sigma0)? <= eps {
                    let dual_value = lambda.inner(&sigma0);
                    return Ok(OracleOutput {
                        minimizer: sigma0,
                        multiplier: 0.0,
                        dual_value,
                        lagrangian_value: dual_value,
                        bracket,
                        stated_bracket: stated,
                        scalar_solver_iters: doublings,
                        status: OracleStatus::Inactive,
                    });
                }
            }
            return Err(not_bracketed(t_hi));
        }
        t_hi *= 2.0;
        hi_gap = evaluate(lambda, center, eps, t_hi, &basis)?.gap;
        doublings += 1;
    }

    let mut failure = None;
    let root = brent_root(
        |t| match evaluate(lambda, center, eps, t, &basis) {
            Ok(e) => e.gap,
            Err(err) => {
                failure.get_or_insert(err);
                f64::NAN
            }
        },
        t_lo,
        t_hi,
        first.gap,
        hi_gap,
        GAMMA_RTOL,
        MAX_SCALAR_ITERS,
    );
    if let Some(err) = failure {
        return Err(err.into());
    }
    let root = root.ok_or_else(|| not_bracketed(t_hi))?;
    let sigma = evaluate(lambda, center, eps, root.x, &basis)?.minimizer;
    Ok(active(lambda, ball, sigma, 1.0 / (2.0 * root.x), bracket, stated, doublings + root.iterations))
}

fn active(
    lambda: &SymmetricMatrix,
    ball: &AmbiguityBall,
    minimizer: SymmetricMatrix,
    gamma: f64,
    bracket: Bracket,
    stated: Bracket,
    iters: usize,
) -> OracleOutput {
    let dual_value = lambda.inner(&minimizer);
    let diff = minimizer.sub(ball.center());
    let eps = ball.radius();
    let lagrangian_value = dual_value + gamma * (diff.inner(&diff) - eps * eps);
    OracleOutput {
        minimizer,
        multiplier: gamma,
        dual_value,
        lagrangian_value,
        bracket,
        stated_bracket: stated,
        scalar_solver_iters: iters,
        status: OracleStatus::Active,
    }
}
