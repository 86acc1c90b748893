//! Euclidean projection onto the dual feasible set
//! `{ Lambda : diag(Lambda) <= 0 } ∩ { Lambda : I - Lambda >= 0 }` by Dykstra's
//! alternating scheme.

use crate::linalg::{eig_sym, eig_sym_warm, LinalgError, SpectralDecomposition, SymmetricMatrix};

pub const DEFAULT_DYKSTRA_TOL: f64 = 1e-6;
pub const DEFAULT_DYKSTRA_MAX_ITERS: usize = 10_000;

/// Projection onto `{ diag <= 0 }`: clamps the diagonal, leaves the rest.
pub fn project_s1(lambda: &SymmetricMatrix) -> SymmetricMatrix {
    lambda.map_diag(|v| v.min(0.0))
}

/// Projection onto `{ Lambda <= I }`: caps eigenvalues at 1.
pub fn project_s2(lambda: &SymmetricMatrix) -> Result<SymmetricMatrix, LinalgError> {
    let eig = eig_sym(lambda)?;
    Ok(cap_at_one(lambda, &eig))
}

fn cap_at_one(lambda: &SymmetricMatrix, eig: &SpectralDecomposition) -> SymmetricMatrix {
    if eig.lambda_max() <= 1.0 {
        return lambda.clone();
    }
    eig.reconstruct(|l| l.min(1.0))
}

/// Final state of a Dykstra run.
#[derive(Debug, Clone)]
pub struct DykstraState {
    /// Last `S2` iterate, the returned projection.
    pub primal: SymmetricMatrix,
    /// Correction terms for the `S1` and `S2` steps.
    pub corrections: (SymmetricMatrix, SymmetricMatrix),
    pub iterations: usize,
    /// `||U2 - U1||_F / ||U2||_F` at exit, absolute when `U2 = 0`.
    pub residual: f64,
    pub converged: bool,
    pub residual_history: Vec<f64>,
}

/// Dykstra's algorithm started from `U2 = lambda`, `Z1 = Z2 = 0`; runs until
/// the relative gap between the two iterates drops below `tol`.
pub fn dykstra_project(lambda: &SymmetricMatrix, max_iters: usize, tol: f64) -> Result<DykstraState, LinalgError> {
    let n = lambda.dim();
    let zero = SymmetricMatrix::zeros(n);
    if lambda.frobenius_norm() == 0.0 {
        return Ok(DykstraState {
            primal: zero.clone(),
            corrections: (zero.clone(), zero),
            iterations: 0,
            residual: 0.0,
            converged: true,
            residual_history: Vec::new(),
        });
    }
    let mut u2 = lambda.clone();
    let mut z1 = zero.clone();
    let mut z2 = zero;
    let mut history = Vec::new();
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    // Consecutive S2 inputs differ little, so each eigendecomposition starts
    // from the previous basis.
    let mut basis: Option<SpectralDecomposition> = None;
    while iterations < max_iters.max(1) {
        iterations += 1;
        let y1 = u2.add(&z1);
        let u1 = project_s1(&y1);
        z1 = y1.sub(&u1);
        let y2 = u1.add(&z2);
        let eig = match &basis {
            Some(prev) => eig_sym_warm(&y2, prev)?,
            None => eig_sym(&y2)?,
        };
        u2 = cap_at_one(&y2, &eig);
        basis = Some(eig);
        z2 = y2.sub(&u2);

        let gap = u2.sub(&u1).frobenius_norm();
        let denom = u2.frobenius_norm();
        residual = if denom > 0.0 { gap / denom } else { gap };
        history.push(residual);
        if residual < tol {
            break;
        }
    }
    Ok(DykstraState {
        primal: u2,
        corrections: (z1, z2),
        iterations,
        converged: residual < tol,
        residual,
        residual_history: history,
    })
}

/// `max(max_i Lambda_ii, lambda_max(Lambda) - 1, 0)`.
pub fn feasibility_violation(lambda: &SymmetricMatrix) -> Result<f64, LinalgError> {
    let diag = lambda.diag().into_iter().fold(0.0f64, f64::max);
    let top = eig_sym(lambda)?.lambda_max() - 1.0;
    Ok(diag.max(top).max(0.0))
}
