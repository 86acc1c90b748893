//! Reference oracle that never touches the multiplier formulas.
//!
//! Frobenius uses projected gradient with the exact projection onto
//! `PSD ∩ ball`, obtained by Dykstra between eigenvalue clamping and radial
//! shrinking. KL and Gelbrich walk along the ball boundary: the descent
//! direction is stripped of its component along a finite-difference normal,
//! then the candidate is PSD-projected and pulled back along the segment to
//! the center by bisection. Only small dimensions are practical.

use super::{Bracket, OracleError, OracleOutput, OracleStatus};
use crate::distances::{AmbiguityBall, DistanceKind};
use crate::linalg::{psd_project, SymmetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceConfig {
    pub steps: usize,
    /// Initial step length, relative to the ball radius.
    pub rate: f64,
    /// Finite-difference step, relative to `max(1, ||center||_F)`.
    pub fd_step: f64,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        Self { steps: 4000, rate: 0.5, fd_step: 1e-6 }
    }
}

/// Best feasible point found for `min <Lambda, Sigma>` over the ball.
pub fn lmo_bruteforce(
    lambda: &SymmetricMatrix,
    ball: &AmbiguityBall,
    config: &BruteForceConfig,
) -> Result<OracleOutput, OracleError> {
    super::check_input(lambda, ball, ball.kind())?;
    let eps = ball.radius();
    let unbounded = Bracket { lo: 0.0, hi: f64::INFINITY };
    if eps == 0.0 || lambda.frobenius_norm() <= super::TOL_ZERO {
        return Ok(OracleOutput::degenerate(lambda, ball, unbounded));
    }
    let (minimizer, iters) = match ball.kind() {
        DistanceKind::Frobenius => frobenius_descent(lambda, ball, config)?,
        DistanceKind::Kl | DistanceKind::Gelbrich => boundary_descent(lambda, ball, config)?,
    };
    let dual_value = lambda.inner(&minimizer);
    let on_boundary = ball.distance(&minimizer)? >= eps * (1.0 - 1e-4);
    let multiplier = if on_boundary { multiplier_estimate(lambda, ball, &minimizer, config)? } else { 0.0 };
    Ok(OracleOutput {
        minimizer,
        multiplier,
        dual_value,
        lagrangian_value: dual_value,
        bracket: unbounded,
        stated_bracket: unbounded,
        scalar_solver_iters: iters,
        status: if on_boundary { OracleStatus::Active } else { OracleStatus::Inactive },
    })
}

fn frobenius_descent(
    lambda: &SymmetricMatrix,
    ball: &AmbiguityBall,
    config: &BruteForceConfig,
) -> Result<(SymmetricMatrix, usize), OracleError> {
    let step = config.rate * ball.radius() / lambda.frobenius_norm();
    let mut x = ball.center().clone();
    let mut best = (lambda.inner(&x), x.clone());
    for _ in 0..config.steps {
        let next = project_frobenius_ball(&x.add_scaled(-step, lambda), ball)?;
        let moved = next.sub(&x).frobenius_norm();
        x = next;
        let value = lambda.inner(&x);
        if value < best.0 {
            best = (value, x.clone());
        }
        if moved <= 1e-14 * x.frobenius_norm().max(1.0) {
            break;
        }
    }
    Ok((best.1, config.steps))
}

/// Dykstra between the PSD cone and the Frobenius ball.
fn project_frobenius_ball(y: &SymmetricMatrix, ball: &AmbiguityBall) -> Result<SymmetricMatrix, OracleError> {
    let center = ball.center();
    let eps = ball.radius();
    let n = y.dim();
    let mut x = y.clone();
    let mut p = SymmetricMatrix::zeros(n);
    let mut q = SymmetricMatrix::zeros(n);
    for _ in 0..2000 {
        let a = psd_project(&x.add(&p))?;
        p = x.add(&p).sub(&a);
        let shifted = a.add(&q);
        let offset = shifted.sub(center);
        let r = offset.frobenius_norm();
        let b = if r <= eps { shifted.clone() } else { center.add_scaled(eps / r, &offset) };
        q = shifted.sub(&b);
        let change = b.sub(&x).frobenius_norm();
        x = b;
        if change <= 1e-15 * x.frobenius_norm().max(1.0) {
            break;
        }
    }
    // Finish on the PSD side; the ball side is within roundoff.
    Ok(psd_project(&x)?)
}

/// Orthonormal basis of symmetric matrices: `E_ii` and `(E_ij + E_ji) / sqrt 2`.
fn symmetric_basis(n: usize) -> Vec<SymmetricMatrix> {
    let mut basis = Vec::with_capacity(n * (n + 1) / 2);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in i..n {
            basis.push(SymmetricMatrix::from_fn(n, |a, b| {
                if i == j {
                    if a == i && b == i {
                        1.0
                    } else {
                        0.0
                    }
                } else if (a == i && b == j) || (a == j && b == i) {
                    h
                } else {
                    0.0
                }
            }));
        }
    }
    basis
}

fn fd_gradient(
    f: impl Fn(&SymmetricMatrix) -> f64,
    x: &SymmetricMatrix,
    basis: &[SymmetricMatrix],
    h: f64,
) -> Option<SymmetricMatrix> {
    let mut grad = SymmetricMatrix::zeros(x.dim());
    for e in basis {
        let plus = f(&x.add_scaled(h, e));
        let minus = f(&x.add_scaled(-h, e));
        let d = (plus - minus) / (2.0 * h);
        if !d.is_finite() {
            return None;
        }
        grad = grad.add_scaled(d, e);
    }
    Some(grad)
}

/// Distance, or +inf where undefined (indefinite or singular for KL).
fn safe_distance(ball: &AmbiguityBall, sigma: &SymmetricMatrix) -> f64 {
    ball.distance(sigma).unwrap_or(f64::INFINITY)
}

/// Bisection along `[center, y]` for the last feasible point.
fn retract(ball: &AmbiguityBall, y: &SymmetricMatrix) -> SymmetricMatrix {
    let eps = ball.radius();
    if safe_distance(ball, y) <= eps {
        return y.clone();
    }
    let center = ball.center();
    let dir = y.sub(center);
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if safe_distance(ball, &center.add_scaled(mid, &dir)) <= eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    center.add_scaled(lo, &dir)
}

fn boundary_descent(
    lambda: &SymmetricMatrix,
    ball: &AmbiguityBall,
    config: &BruteForceConfig,
) -> Result<(SymmetricMatrix, usize), OracleError> {
    let n = lambda.dim();
    let basis = symmetric_basis(n);
    let h = config.fd_step * ball.center().frobenius_norm().max(1.0);
    let eps = ball.radius();
    let direction = lambda.scale(1.0 / lambda.frobenius_norm());
    let mut rate = config.rate * eps.min(1.0) * ball.center().frobenius_norm().max(1.0);
    let floor = 1e-15 * ball.center().frobenius_norm().max(1.0);

    let mut x = ball.center().clone();
    let mut value = lambda.inner(&x);
    let mut iters = 0;
    while iters < config.steps && rate > floor {
        iters += 1;
        let full = retract(ball, &psd_project(&x.add_scaled(-rate, &direction))?);
        let mut best = (lambda.inner(&full), full);

        let near_boundary = safe_distance(ball, &x) >= eps * (1.0 - 1e-6);
        if near_boundary {
            if let Some(normal) = fd_gradient(|s| safe_distance(ball, s), &x, &basis, h) {
                let nn = normal.inner(&normal);
                let along = direction.inner(&normal);
                if nn > 0.0 && along < 0.0 {
                    let tangent = direction.add_scaled(-along / nn, &normal);
                    let cand = retract(ball, &psd_project(&x.add_scaled(-rate, &tangent))?);
                    let v = lambda.inner(&cand);
                    if v < best.0 {
                        best = (v, cand);
                    }
                }
            }
        }

        if best.0 < value {
            value = best.0;
            x = best.1;
            rate *= 1.5;
        } else {
            rate *= 0.5;
        }
    }
    Ok((x, iters))
}

/// `||Lambda||_F / ||grad phi||_F`, where `phi` is the constraint function
/// each closed-form oracle dualizes (squared distance for Frobenius and
/// Gelbrich, the divergence itself for KL).
fn multiplier_estimate(
    lambda: &SymmetricMatrix,
    ball: &AmbiguityBall,
    sigma: &SymmetricMatrix,
    config: &BruteForceConfig,
) -> Result<f64, OracleError> {
    let basis = symmetric_basis(sigma.dim());
    let h = config.fd_step * ball.center().frobenius_norm().max(1.0);
    let phi = |s: &SymmetricMatrix| {
        let d = safe_distance(ball, s);
        match ball.kind() {
            DistanceKind::Kl => d,
            DistanceKind::Frobenius | DistanceKind::Gelbrich => d * d,
        }
    };
    Ok(match fd_gradient(phi, sigma, &basis, h) {
        Some(g) if g.frobenius_norm() > 0.0 => lambda.frobenius_norm() / g.frobenius_norm(),
        _ => f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::lmo;
    use crate::linalg::testing::{random_pd, random_symmetric};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_is_orthonormal() {
        let basis = symmetric_basis(3);
        assert_eq!(basis.len(), 6);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b) - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn reproduces_worked_examples() {
        let cfg = BruteForceConfig::default();
        let fro = AmbiguityBall::new(SymmetricMatrix::identity(2), 1.0, DistanceKind::Frobenius).unwrap();
        let out = lmo_bruteforce(&SymmetricMatrix::identity(2), &fro, &cfg).unwrap();
        assert!((out.dual_value - (2.0 - 2f64.sqrt())).abs() < 1e-4, "{}", out.dual_value);

        let gel = AmbiguityBall::new(SymmetricMatrix::identity(2), 1.0, DistanceKind::Gelbrich).unwrap();
        let out = lmo_bruteforce(&SymmetricMatrix::identity(2), &gel, &cfg).unwrap();
        assert!((out.dual_value - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-4, "{}", out.dual_value);

        let kl = AmbiguityBall::new(SymmetricMatrix::identity(2), 0.5, DistanceKind::Kl).unwrap();
        let out = lmo_bruteforce(&SymmetricMatrix::identity(2), &kl, &cfg).unwrap();
        assert!((out.dual_value - 0.6034).abs() < 1e-3, "{}", out.dual_value);
    }

    #[test]
    fn agrees_with_closed_forms_on_small_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cfg = BruteForceConfig::default();
        for kind in DistanceKind::ALL {
            for _ in 0..5 {
                let ball = AmbiguityBall::new(random_pd(&mut rng, 3, 0.3), 0.5, kind).unwrap();
                let lam = random_symmetric(&mut rng, 3, 1.0);
                let exact = lmo(&lam, &ball).unwrap();
                let brute = lmo_bruteforce(&lam, &ball, &cfg).unwrap();
                let tol = 1e-3 * exact.dual_value.abs().max(1.0);
                assert!(
                    (exact.dual_value - brute.dual_value).abs() <= tol,
                    "{kind}: {} vs {}",
                    exact.dual_value,
                    brute.dual_value
                );
            }
        }
    }
}
