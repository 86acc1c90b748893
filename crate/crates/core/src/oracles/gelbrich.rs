//! Gelbrich ball: `Sigma*(gamma) = gamma^2 (gamma I + Lambda)^{-1} center (gamma I + Lambda)^{-1}`.
//!
//! With `Lambda = Q diag(mu) Q^T` and `s_i = (Q^T center Q)_ii`, the Lagrangian
//! dual is the concave function
//! `h(gamma) = sum s_i gamma mu_i / (gamma + mu_i) - gamma eps^2`
//! on `gamma > max(0, -mu_min)`. Its derivative
//! `h'(gamma) = sum s_i mu_i^2 / (gamma + mu_i)^2 - eps^2` is decreasing, so the
//! maximizer is the root of `h'`.
//!
//! The upper end `||Lambda||_F (2 lambda_max(center)^{1/2} + eps)` is divided by
//! `min(1, eps)`: the Slater argument behind it bounds `gamma* eps^2`, and the
//! undivided value is too small once `eps < 1`.

use super::scalar::brent_root;
use super::{
    check_input, clean_psd, null_space_compression, Bracket, OracleError, OracleOutput, OracleStatus, GAMMA_RTOL,
    MAX_SCALAR_ITERS, TOL_ZERO,
};
use crate::distances::{AmbiguityBall, DistanceKind};
use crate::linalg::{eig_sym, tol_pd, SymmetricMatrix};

const MAX_OFFSET_SHRINKS: usize = 300;

fn slope(s: &[f64], mu: &[f64], eps: f64, gamma: f64) -> f64 {
    s.iter()
        .zip(mu)
        .map(|(&si, &mi)| {
            let w = mi / (gamma + mi);
            si * w * w
        })
        .sum::<f64>()
        - eps * eps
}

fn dual(s: &[f64], mu: &[f64], eps: f64, gamma: f64) -> f64 {
    s.iter().zip(mu).map(|(&si, &mi)| si * gamma * mi / (gamma + mi)).sum::<f64>() - gamma * eps * eps
}

/// Gelbrich-ball LMO.
pub fn lmo_gelbrich(lambda: &SymmetricMatrix, ball: &AmbiguityBall) -> Result<OracleOutput, OracleError> {
    check_input(lambda, ball, DistanceKind::Gelbrich)?;
    let eps = ball.radius();
    let norm = lambda.frobenius_norm();
    let lmax_center = ball.center_eig().lambda_max().max(0.0);
    let stated_hi = norm * (2.0 * lmax_center.sqrt() + eps);
    if eps == 0.0 || norm <= TOL_ZERO {
        return Ok(OracleOutput::degenerate(lambda, ball, Bracket { lo: 0.0, hi: stated_hi }));
    }

    let eig = eig_sym(lambda)?;
    let mu = eig.eigenvalues().to_vec();
    let rotated = eig.to_basis(ball.center());
    let s = rotated.diag();
    let stated = Bracket { lo: -eig.lambda_min(), hi: stated_hi };
    let lo = stated.lo.max(0.0);
    let hi = stated_hi / eps.min(1.0);
    let bracket = Bracket { lo, hi };

    let mut offset = 1e-12f64.max(1e-9 * norm);
    let mut start = lo + offset;
    if start >= hi {
        return Err(OracleError::EmptyBracket { kind: DistanceKind::Gelbrich, lo: start, hi });
    }
    let mut start_slope = slope(&s, &mu, eps, start);
    let mut steps = 0;
    if start_slope <= 0.0 {
        let psd = eig.lambda_min() >= -tol_pd(eig.lambda_max().abs()) * 1e2;
        if psd {
            if let Some(sigma0) = null_space_compression(lambda, ball)? {
                if ball.distance(&sigma0)? <= eps + ball.tol_feas() {
                    let dual_value = lambda.inner(&sigma0);
                    return Ok(OracleOutput {
                        minimizer: sigma0,
                        multiplier: 0.0,
                        dual_value,
                        lagrangian_value: dual_value,
                        bracket,
                        stated_bracket: stated,
                        scalar_solver_iters: 0,
                        status: OracleStatus::Inactive,
                    });
                }
            }
        }
        // The root sits closer to the pole than the default offset.
        while start_slope <= 0.0 {
            if steps == MAX_OFFSET_SHRINKS {
                return Err(OracleError::NotBracketed { kind: DistanceKind::Gelbrich, lo, hi });
            }
            offset *= 0.1;
            let next = lo + offset;
            if next <= lo {
                return Err(OracleError::NotBracketed { kind: DistanceKind::Gelbrich, lo, hi });
            }
            start = next;
            start_slope = slope(&s, &mu, eps, start);
            steps += 1;
        }
    }
    let hi_slope = slope(&s, &mu, eps, hi);
    if hi_slope > 0.0 {
        return Err(OracleError::NotBracketed { kind: DistanceKind::Gelbrich, lo: start, hi });
    }
    let root = brent_root(|g| slope(&s, &mu, eps, g), start, hi, start_slope, hi_slope, GAMMA_RTOL, MAX_SCALAR_ITERS)
        .ok_or(OracleError::NotBracketed { kind: DistanceKind::Gelbrich, lo: start, hi })?;
    let gamma = root.x;

    let w: Vec<f64> = mu.iter().map(|&m| gamma / (gamma + m)).collect();
    let n = mu.len();
    let scaled = SymmetricMatrix::from_fn(n, |i, j| w[i] * rotated.get(i, j) * w[j]);
    let minimizer = clean_psd(eig.from_basis(&scaled))?;
    let dual_value = lambda.inner(&minimizer);
    Ok(OracleOutput {
        minimizer,
        multiplier: gamma,
        dual_value,
        lagrangian_value: dual(&s, &mu, eps, gamma),
        bracket,
        stated_bracket: stated,
        scalar_solver_iters: steps + root.iterations,
        status: OracleStatus::Active,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testing::{random_pd, random_symmetric};
    use crate::linalg::{inverse_pd, lambda_min};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ball(center: SymmetricMatrix, eps: f64) -> AmbiguityBall {
        AmbiguityBall::new(center, eps, DistanceKind::Gelbrich).unwrap()
    }

    #[test]
    fn scalar_example() {
        let b = ball(SymmetricMatrix::from_diag(&[4.0]), 1.0);
        let out = lmo_gelbrich(&SymmetricMatrix::from_diag(&[1.0]), &b).unwrap();
        assert!((out.minimizer.get(0, 0) - 1.0).abs() < 1e-10);
        assert!((out.dual_value - 1.0).abs() < 1e-10);
        assert!((out.multiplier - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_example() {
        let b = ball(SymmetricMatrix::identity(2), 1.0);
        let out = lmo_gelbrich(&SymmetricMatrix::identity(2), &b).unwrap();
        let root2 = 2f64.sqrt();
        assert!((out.multiplier - (root2 - 1.0)).abs() < 1e-10);
        let s = (1.0 - 1.0 / root2).powi(2);
        assert!((out.minimizer.get(0, 0) - s).abs() < 1e-10);
        assert!((out.dual_value - (3.0 - 2.0 * root2)).abs() < 1e-10);
        assert!((out.lagrangian_value - out.dual_value).abs() < 1e-10);
    }

    #[test]
    fn small_radius_exceeds_stated_upper_end() {
        // center 4, Lambda 1, eps 0.1: gamma* = 19 > 1 * (2 * 2 + 0.1)
        let b = ball(SymmetricMatrix::from_diag(&[4.0]), 0.1);
        let out = lmo_gelbrich(&SymmetricMatrix::from_diag(&[1.0]), &b).unwrap();
        assert!((out.multiplier - 19.0).abs() < 1e-8);
        assert!(!out.stated_bracket.contains(out.multiplier));
        assert!(out.bracket.contains(out.multiplier));
        assert!((out.minimizer.get(0, 0) - 3.61).abs() < 1e-9);
    }

    #[test]
    fn matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let center = random_pd(&mut rng, 4, 0.2);
            let b = ball(center.clone(), 0.5);
            let lam = random_symmetric(&mut rng, 4, 1.0);
            let out = lmo_gelbrich(&lam, &b).unwrap();
            let g = out.multiplier;
            let inv = inverse_pd(&SymmetricMatrix::scaled_identity(4, g).add(&lam)).unwrap();
            let expected = inv.sandwich(&center).scale(g * g);
            let err = out.minimizer.sub(&expected).frobenius_norm() / expected.frobenius_norm();
            assert!(err < 1e-9, "{err}");
        }
    }

    #[test]
    fn random_inputs_are_feasible_and_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for &eps in &[0.01, 0.1, 1.0, 10.0] {
            for _ in 0..10 {
                let b = ball(random_pd(&mut rng, 5, 0.1), eps);
                let lam = random_symmetric(&mut rng, 5, 1.0);
                let out = lmo_gelbrich(&lam, &b).unwrap();
                assert!(lambda_min(&out.minimizer).unwrap() > -1e-10);
                let d = b.distance(&out.minimizer).unwrap();
                assert!(d <= eps + b.tol_feas(), "{d} vs {eps}");
                assert!(out.bracket.contains(out.multiplier));
                let gap = (out.lagrangian_value - out.dual_value).abs();
                assert!(gap <= 1e-8 * out.dual_value.abs().max(1.0), "{gap}");
            }
        }
    }

    #[test]
    fn psd_multiplier_can_be_inactive() {
        let b = ball(SymmetricMatrix::identity(2), 5.0);
        let out = lmo_gelbrich(&SymmetricMatrix::from_diag(&[1.0, 0.0]), &b).unwrap();
        assert_eq!(out.status, OracleStatus::Inactive);
        assert!(out.dual_value.abs() < 1e-12);
    }
}
