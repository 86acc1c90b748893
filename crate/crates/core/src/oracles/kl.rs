//! KL ball: `Sigma*(gamma) = (center^{-1} + (2 / gamma) Lambda)^{-1}`.
//!
//! With `S = center^{1/2}` and `S Lambda S = Q diag(m) Q^T`, the minimizer is
//! `S Q diag(r) Q^T S` where `r_i = gamma / (gamma + 2 m_i)`. Its divergence
//! from the center is `(1/2) sum (r_i - 1 - ln r_i)`, which decreases in
//! `gamma` on the admissible interval, so one eigendecomposition per call
//! suffices.

use super::scalar::{brent_root, golden_section_max};
use super::{
    check_input, kl_gamma_factor, Bracket, OracleError, OracleOutput, OracleStatus, GAMMA_RTOL, MAX_SCALAR_ITERS,
    TOL_ZERO,
};
use crate::distances::{kl_from_ratios, AmbiguityBall, DistanceKind};
use crate::linalg::{eig_sym, SymmetricMatrix};

const MONOTONE_SAMPLES: usize = 5;
const HI_INFLATION: f64 = 10.0;

fn ratios(m: &[f64], gamma: f64) -> Vec<f64> {
    m.iter().map(|&mi| gamma / (gamma + 2.0 * mi)).collect()
}

fn kl_at(m: &[f64], gamma: f64) -> f64 {
    let r = ratios(m, gamma);
    kl_from_ratios(&r)
}

fn lagrangian(m: &[f64], eps: f64, gamma: f64) -> f64 {
    let r = ratios(m, gamma);
    let linear: f64 = m.iter().zip(&r).map(|(a, b)| a * b).sum();
    linear + gamma * (kl_from_ratios(&r) - eps)
}

/// KL-ball LMO.
pub fn lmo_kl(lambda: &SymmetricMatrix, ball: &AmbiguityBall) -> Result<OracleOutput, OracleError> {
    check_input(lambda, ball, DistanceKind::Kl)?;
    let eps = ball.radius();
    let sqrt = ball.center_sqrt();
    let eig = eig_sym(&sqrt.sandwich(lambda))?;
    let m = eig.eigenvalues().to_vec();
    let nuclear: f64 = m.iter().map(|v| v.abs()).sum();
    let lo = (-2.0 * eig.lambda_min()).max(0.0);
    let stated = Bracket { lo, hi: nuclear * kl_gamma_factor(eps) };
    if eps == 0.0 || lambda.frobenius_norm() <= TOL_ZERO || nuclear == 0.0 {
        return Ok(OracleOutput::degenerate(lambda, ball, stated));
    }

    let gap = |g: f64| kl_at(&m, g) - eps;
    let mut hi = stated.hi;
    let mut hi_gap = gap(hi);
    if hi_gap > 0.0 {
        hi *= HI_INFLATION;
        hi_gap = gap(hi);
        if hi_gap > 0.0 {
            return Err(OracleError::NotBracketed { kind: DistanceKind::Kl, lo, hi });
        }
    }
    if hi <= lo {
        return Err(OracleError::EmptyBracket { kind: DistanceKind::Kl, lo, hi });
    }
    let bracket = Bracket { lo, hi };

    // Walk toward the pole at `lo` until the divergence exceeds eps.
    let mut a = hi;
    let mut a_gap = hi_gap;
    let mut b = hi;
    let mut b_gap = hi_gap;
    let mut steps = 0;
    while a_gap <= 0.0 {
        let next = lo + 0.5 * (a - lo);
        if next <= lo || steps == 2000 {
            return Err(OracleError::NotBracketed { kind: DistanceKind::Kl, lo, hi });
        }
        b = a;
        b_gap = a_gap;
        a = next;
        a_gap = gap(a);
        steps += 1;
    }

    let gamma = if is_monotone(&gap, a, hi) {
        let root = brent_root(gap, a, b, a_gap, b_gap, GAMMA_RTOL, MAX_SCALAR_ITERS)
            .ok_or(OracleError::NotBracketed { kind: DistanceKind::Kl, lo, hi })?;
        steps += root.iterations;
        root.x
    } else {
        let best = golden_section_max(|g| lagrangian(&m, eps, g), a, hi, GAMMA_RTOL, 4 * MAX_SCALAR_ITERS);
        steps += best.iterations;
        best.x
    };

    let r = ratios(&m, gamma);
    let minimizer = sqrt.sandwich(&eig.reconstruct_with_weights(&r));
    let dual_value = lambda.inner(&minimizer);
    Ok(OracleOutput {
        minimizer,
        multiplier: gamma,
        dual_value,
        lagrangian_value: lagrangian(&m, eps, gamma),
        bracket,
        stated_bracket: stated,
        scalar_solver_iters: steps,
        status: OracleStatus::Active,
    })
}

/// Spot check that `f` does not increase across a few geometric samples.
fn is_monotone(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> bool {
    let ratio = (b / a).powf(1.0 / (MONOTONE_SAMPLES - 1) as f64);
    let mut prev = f(a);
    let mut x = a;
    for _ in 1..MONOTONE_SAMPLES {
        x *= ratio;
        let v = f(x.min(b));
        if v > prev + 1e-12 * prev.abs().max(1.0) {
            return false;
        }
        prev = v;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testing::{random_pd, random_symmetric};
    use crate::linalg::{inverse_pd, lambda_min};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ball(center: SymmetricMatrix, eps: f64) -> AmbiguityBall {
        AmbiguityBall::new(center, eps, DistanceKind::Kl).unwrap()
    }

    #[test]
    fn scalar_example() {
        let b = ball(SymmetricMatrix::from_diag(&[1.0]), 0.5);
        let out = lmo_kl(&SymmetricMatrix::from_diag(&[1.0]), &b).unwrap();
        let s = out.minimizer.get(0, 0);
        assert!((s - 0.1586).abs() < 1e-3, "{s}");
        assert!((s - s.ln() - 2.0).abs() < 1e-10);
        assert!(out.stated_bracket.contains(out.multiplier));
    }

    #[test]
    fn identity_example() {
        let b = ball(SymmetricMatrix::identity(2), 0.5);
        let out = lmo_kl(&SymmetricMatrix::identity(2), &b).unwrap();
        let s = out.minimizer.get(0, 0);
        assert!((s - 0.3017).abs() < 1e-3, "{s}");
        assert!((s - s.ln() - 1.5).abs() < 1e-10);
        assert!((out.dual_value - 2.0 * s).abs() < 1e-12);
        assert!(out.minimizer.get(0, 1).abs() < 1e-12);
    }

    #[test]
    fn matches_inverse_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let center = random_pd(&mut rng, 4, 0.5);
            let b = ball(center.clone(), 0.3);
            let lam = random_symmetric(&mut rng, 4, 1.0);
            let out = lmo_kl(&lam, &b).unwrap();
            let inv = inverse_pd(&center).unwrap().add_scaled(2.0 / out.multiplier, &lam);
            let expected = inverse_pd(&inv).unwrap();
            let err = out.minimizer.sub(&expected).frobenius_norm() / expected.frobenius_norm();
            assert!(err < 1e-9, "{err}");
        }
    }

    #[test]
    fn random_inputs_are_feasible_and_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for &eps in &[0.01, 1.0 / 24.0, 0.1, 1.0, 10.0] {
            for _ in 0..10 {
                let b = ball(random_pd(&mut rng, 5, 0.1), eps);
                let lam = random_symmetric(&mut rng, 5, 1.0);
                let out = lmo_kl(&lam, &b).unwrap();
                assert!(lambda_min(&out.minimizer).unwrap() > 0.0);
                let d = b.distance(&out.minimizer).unwrap();
                assert!((d - eps).abs() < 1e-8 * eps.max(1.0), "{d} vs {eps}");
                assert!(out.stated_bracket.contains(out.multiplier));
                assert!(out.lagrangian_value <= out.dual_value + 1e-8 * out.dual_value.abs().max(1.0));
            }
        }
    }

    #[test]
    fn degenerate_inputs_return_center() {
        let center = SymmetricMatrix::from_diag(&[2.0, 1.0]);
        let out = lmo_kl(&SymmetricMatrix::zeros(2), &ball(center.clone(), 1.0)).unwrap();
        assert_eq!(out.status, OracleStatus::Degenerate);
        assert_eq!(out.minimizer, center);
    }
}
