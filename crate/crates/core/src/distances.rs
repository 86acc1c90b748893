//! Distances between covariance matrices, the ambiguity ball they induce,
//! and two lower bounds used to bracket the oracle multipliers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, eig_sym, tol_pd, LinalgError, SpectralDecomposition, SymmetricMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistanceError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("reference covariance must be positive definite (lambda_min = {lambda_min:e})")]
    SingularReference { lambda_min: f64 },
    #[error("matrix is not positive semidefinite (lambda_min = {lambda_min:e})")]
    Indefinite { lambda_min: f64 },
    #[error("radius must be finite and nonnegative, got {0}")]
    InvalidRadius(f64),
    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceKind {
    Frobenius,
    Kl,
    Gelbrich,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 3] = [DistanceKind::Frobenius, DistanceKind::Kl, DistanceKind::Gelbrich];

    pub fn as_str(self) -> &'static str {
        match self {
            DistanceKind::Frobenius => "frobenius",
            DistanceKind::Kl => "kl",
            DistanceKind::Gelbrich => "gelbrich",
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "frobenius" | "fro" | "f" => Ok(DistanceKind::Frobenius),
            "kl" | "kullback-leibler" => Ok(DistanceKind::Kl),
            "gelbrich" | "gel" | "wasserstein" => Ok(DistanceKind::Gelbrich),
            other => Err(format!("unknown distance '{other}' (expected frobenius, kl or gelbrich)")),
        }
    }
}

fn check_dims(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<(), DistanceError> {
    if a.dim() != b.dim() {
        return Err(DistanceError::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(())
}

/// `||sigma - reference||_F`.
pub fn dist_frobenius(sigma: &SymmetricMatrix, reference: &SymmetricMatrix) -> Result<f64, DistanceError> {
    check_dims(sigma, reference)?;
    Ok(sigma.sub(reference).frobenius_norm())
}

/// KL divergence between `N(0, sigma)` and `N(0, reference)`.
///
/// Returns `+inf` when `sigma` is not positive definite, so that ball
/// membership checks compose without special cases.
pub fn dist_kl(sigma: &SymmetricMatrix, reference: &SymmetricMatrix) -> Result<f64, DistanceError> {
    check_dims(sigma, reference)?;
    let inv_sqrt = reference_inv_sqrt(reference)?;
    Ok(kl_whitened(sigma, &inv_sqrt)?)
}

fn reference_inv_sqrt(reference: &SymmetricMatrix) -> Result<SymmetricMatrix, DistanceError> {
    let eig = eig_sym(reference)?;
    if eig.lambda_min() < tol_pd(eig.lambda_max()) {
        return Err(DistanceError::SingularReference { lambda_min: eig.lambda_min() });
    }
    Ok(eig.reconstruct(|l| 1.0 / l.sqrt()))
}

/// KL from the eigenvalues of `R^{-1/2} sigma R^{-1/2}`:
/// `(1/2) sum (l - 1 - ln l)`, which equals the log-det form exactly.
pub(crate) fn kl_whitened(sigma: &SymmetricMatrix, inv_sqrt: &SymmetricMatrix) -> Result<f64, LinalgError> {
    let w = inv_sqrt.sandwich(sigma);
    let eig = eig_sym(&w)?;
    Ok(kl_from_ratios(eig.eigenvalues()))
}

pub(crate) fn kl_from_ratios(ratios: &[f64]) -> f64 {
    if ratios.iter().any(|&l| l <= 0.0) {
        return f64::INFINITY;
    }
    0.5 * ratios.iter().map(|&l| (l - 1.0) - l.ln()).sum::<f64>()
}

/// Gelbrich (2-Wasserstein between zero-mean Gaussians) distance
/// `sqrt(Tr(sigma + ref - 2 (ref^{1/2} sigma ref^{1/2})^{1/2}))`.
pub fn dist_gelbrich(sigma: &SymmetricMatrix, reference: &SymmetricMatrix) -> Result<f64, DistanceError> {
    check_dims(sigma, reference)?;
    check_psd(sigma)?;
    let ref_sqrt = psd_sqrt_checked(reference)?;
    gelbrich_with_sqrt(sigma, reference, &ref_sqrt)
}

pub(crate) fn gelbrich_with_sqrt(
    sigma: &SymmetricMatrix,
    reference: &SymmetricMatrix,
    ref_sqrt: &SymmetricMatrix,
) -> Result<f64, DistanceError> {
    let cross = ref_sqrt.sandwich(sigma);
    let eig = eig_sym(&cross)?;
    let cross_trace: f64 = eig.eigenvalues().iter().map(|l| l.max(0.0).sqrt()).sum();
    let sq = sigma.trace() + reference.trace() - 2.0 * cross_trace;
    Ok(sq.max(0.0).sqrt())
}

/// Distance of the given kind from `sigma` to `reference`.
pub fn dist(kind: DistanceKind, sigma: &SymmetricMatrix, reference: &SymmetricMatrix) -> Result<f64, DistanceError> {
    match kind {
        DistanceKind::Frobenius => dist_frobenius(sigma, reference),
        DistanceKind::Kl => dist_kl(sigma, reference),
        DistanceKind::Gelbrich => dist_gelbrich(sigma, reference),
    }
}

fn check_psd(a: &SymmetricMatrix) -> Result<SpectralDecomposition, DistanceError> {
    let eig = eig_sym(a)?;
    if eig.lambda_min() < -tol_pd(eig.lambda_max()) {
        return Err(DistanceError::Indefinite { lambda_min: eig.lambda_min() });
    }
    Ok(eig)
}

fn psd_sqrt_checked(a: &SymmetricMatrix) -> Result<SymmetricMatrix, DistanceError> {
    let eig = check_psd(a)?;
    Ok(linalg::sqrt_from_eig(&eig)?)
}

/// Piecewise quadratic/linear minorant of `l - 1 - ln l`:
/// `(l-1)^2 / 3` on `[0, 3/2]` and `l/3 - 5/12` beyond.
pub fn kl_lower_bound_f(lambda: f64) -> Result<f64, DistanceError> {
    if !(lambda >= 0.0) {
        return Err(DistanceError::NegativeArgument(lambda));
    }
    Ok(if lambda <= 1.5 {
        (lambda - 1.0).powi(2) / 3.0
    } else {
        lambda / 3.0 - 5.0 / 12.0
    })
}

/// Radius of the eigenvalue band implied by `KL(sigma || ref) <= eps`:
/// every eigenvalue of `ref^{-1/2} sigma ref^{-1/2}` lies within this
/// distance of 1.
pub fn kl_eigen_radius(eps: f64) -> f64 {
    if eps <= 1.0 / 24.0 {
        (6.0 * eps).sqrt()
    } else {
        6.0 * eps + 0.25
    }
}

/// `||sigma - ref||_F / (2 lambda_max(ref)^{1/2} + eps)`, a lower bound on
/// `Gel(sigma, ref)` for every `sigma` in the Gelbrich ball of radius `eps`.
pub fn gelbrich_strong_convexity_bound(
    sigma: &SymmetricMatrix,
    reference: &SymmetricMatrix,
    eps: f64,
) -> Result<f64, DistanceError> {
    check_dims(sigma, reference)?;
    let lmax = linalg::lambda_max(reference)?.max(0.0);
    Ok(sigma.sub(reference).frobenius_norm() / (2.0 * lmax.sqrt() + eps))
}

/// `||lambda^{1/2}(sigma) - lambda^{1/2}(ref)||_2` with eigenvalues paired in
/// descending order, a lower bound on `Gel(sigma, ref)`.
///
/// The Frobenius-type companion `||sigma - ref||_F / lambda_max^{1/2}(sigma +
/// ref + 2 (ref^{1/2} sigma ref^{1/2})^{1/2})` is deliberately left out: it
/// fails for some non-commuting pairs, e.g. a rank-one pair in two dimensions
/// where it exceeds the distance by about 4%.
pub fn gelbrich_lower_bound(sigma: &SymmetricMatrix, reference: &SymmetricMatrix) -> Result<f64, DistanceError> {
    check_dims(sigma, reference)?;
    let es = check_psd(sigma)?;
    let er = check_psd(reference)?;
    Ok(es
        .eigenvalues()
        .iter()
        .zip(er.eigenvalues())
        .map(|(a, b)| (a.max(0.0).sqrt() - b.max(0.0).sqrt()).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// `{ sigma >= 0 : dist(sigma, center) <= radius }`, with the spectral data
/// of the center cached for the oracles.
#[derive(Clone, Debug)]
pub struct AmbiguityBall {
    center: SymmetricMatrix,
    radius: f64,
    kind: DistanceKind,
    center_eig: SpectralDecomposition,
    center_sqrt: SymmetricMatrix,
    center_inv_sqrt: Option<SymmetricMatrix>,
}

impl AmbiguityBall {
    pub fn new(center: SymmetricMatrix, radius: f64, kind: DistanceKind) -> Result<Self, DistanceError> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(DistanceError::InvalidRadius(radius));
        }
        let center_eig = check_psd(&center)?;
        let tol = tol_pd(center_eig.lambda_max());
        let center_inv_sqrt = if center_eig.lambda_min() >= tol {
            Some(center_eig.reconstruct(|l| 1.0 / l.sqrt()))
        } else if kind == DistanceKind::Kl {
            return Err(DistanceError::SingularReference { lambda_min: center_eig.lambda_min() });
        } else {
            None
        };
        let center_sqrt = linalg::sqrt_from_eig(&center_eig)?;
        Ok(Self { center, radius, kind, center_eig, center_sqrt, center_inv_sqrt })
    }

    pub fn center(&self) -> &SymmetricMatrix {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn center_eig(&self) -> &SpectralDecomposition {
        &self.center_eig
    }

    pub fn center_sqrt(&self) -> &SymmetricMatrix {
        &self.center_sqrt
    }

    /// `center^{-1/2}`; present whenever the center is positive definite.
    pub fn center_inv_sqrt(&self) -> Option<&SymmetricMatrix> {
        self.center_inv_sqrt.as_ref()
    }

    /// Same center and kind, different radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self, DistanceError> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(DistanceError::InvalidRadius(radius));
        }
        Ok(Self { radius, ..self.clone() })
    }

    /// Distance from `sigma` to the center under this ball's metric.
    pub fn distance(&self, sigma: &SymmetricMatrix) -> Result<f64, DistanceError> {
        check_dims(sigma, &self.center)?;
        match self.kind {
            DistanceKind::Frobenius => dist_frobenius(sigma, &self.center),
            DistanceKind::Kl => {
                let inv = self.center_inv_sqrt.as_ref().expect("KL ball has a PD center");
                Ok(kl_whitened(sigma, inv)?)
            }
            DistanceKind::Gelbrich => {
                check_psd(sigma)?;
                gelbrich_with_sqrt(sigma, &self.center, &self.center_sqrt)
            }
        }
    }

    /// Membership tolerance `1e-7 * max(1, radius)`.
    pub fn tol_feas(&self) -> f64 {
        1e-7 * self.radius.max(1.0)
    }

    /// `sigma >= -tol_pd I` and `dist(sigma, center) <= radius + tol_feas`.
    pub fn contains(&self, sigma: &SymmetricMatrix) -> bool {
        in_ball(sigma, self)
    }
}

pub fn in_ball(sigma: &SymmetricMatrix, ball: &AmbiguityBall) -> bool {
    if sigma.dim() != ball.dim() {
        return false;
    }
    let Ok(eig) = eig_sym(sigma) else { return false };
    if eig.lambda_min() < -tol_pd(eig.lambda_max()) {
        return false;
    }
    match ball.distance(sigma) {
        Ok(d) => d <= ball.radius + ball.tol_feas(),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::linalg::testing::{random_pd, random_symmetric};

    fn diag(d: &[f64]) -> SymmetricMatrix {
        SymmetricMatrix::from_diag(d)
    }

    #[test]
    fn frobenius_examples() {
        let i2 = SymmetricMatrix::identity(2);
        assert_eq!(dist_frobenius(&i2, &i2).unwrap(), 0.0);
        assert_eq!(dist_frobenius(&diag(&[3.0, 1.0]), &i2).unwrap(), 2.0);
        assert!((dist_frobenius(&diag(&[3.0, 2.0]), &i2).unwrap() - 5f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            dist_frobenius(&i2, &SymmetricMatrix::identity(3)),
            Err(DistanceError::DimensionMismatch { .. })
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let a = random_symmetric(&mut rng, 4, 2.0);
            let b = random_symmetric(&mut rng, 4, 2.0);
            let entrywise: f64 = (0..4)
                .flat_map(|i| (0..4).map(move |j| (i, j)))
                .map(|(i, j)| (a.get(i, j) - b.get(i, j)).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!((dist_frobenius(&a, &b).unwrap() - entrywise).abs() < 1e-12);
        }
    }

    #[test]
    fn kl_examples() {
        let i3 = SymmetricMatrix::identity(3);
        assert_eq!(dist_kl(&i3, &i3).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let kl = dist_kl(&diag(&[e]), &diag(&[1.0])).unwrap();
        assert!((kl - (e - 2.0) / 2.0).abs() < 1e-14);
        assert!((kl - 0.3591409).abs() < 1e-6);
        assert_eq!(dist_kl(&diag(&[1.0, 0.0]), &SymmetricMatrix::identity(2)).unwrap(), f64::INFINITY);
        assert!(matches!(
            dist_kl(&i3, &diag(&[1.0, 1.0, 0.0])),
            Err(DistanceError::SingularReference { .. })
        ));
    }

    /// The whitened-eigenvalue route agrees with the textbook log-det formula.
    #[test]
    fn kl_matches_logdet_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let n = rng.random_range(1..6);
            let s = random_pd(&mut rng, n, 0.2);
            let r = random_pd(&mut rng, n, 0.2);
            let logdet = |m: &SymmetricMatrix| eig_sym(m).unwrap().eigenvalues().iter().map(|l| l.ln()).sum::<f64>();
            let rinv = linalg::inverse_pd(&r).unwrap();
            let formula = 0.5 * (-logdet(&s) + logdet(&r) + s.inner(&rinv) - n as f64);
            let kl = dist_kl(&s, &r).unwrap();
            assert!(kl >= 0.0);
            assert!((kl - formula).abs() <= 1e-9 * formula.abs().max(1.0), "{kl} vs {formula}");
        }
    }

    #[test]
    fn gelbrich_examples() {
        let i2 = SymmetricMatrix::identity(2);
        assert!(dist_gelbrich(&i2, &i2).unwrap() < 1e-12);
        let four = SymmetricMatrix::scaled_identity(2, 4.0);
        assert!((dist_gelbrich(&four, &i2).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let a = SymmetricMatrix::scaled_identity(3, 2.5);
        let expect = 3f64.sqrt() * (2.5f64.sqrt() - 1.0).abs();
        assert!((dist_gelbrich(&a, &SymmetricMatrix::identity(3)).unwrap() - expect).abs() < 1e-12);
        assert!(matches!(
            dist_gelbrich(&diag(&[1.0, -1.0]), &i2),
            Err(DistanceError::Indefinite { .. })
        ));
    }

    #[test]
    fn gelbrich_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.random_range(1..6);
            let a = random_pd(&mut rng, n, 0.0);
            let b = random_pd(&mut rng, n, 0.0);
            let ab = dist_gelbrich(&a, &b).unwrap();
            let ba = dist_gelbrich(&b, &a).unwrap();
            assert!((ab - ba).abs() <= 1e-8, "{ab} vs {ba}");
        }
    }

    #[test]
    fn distances_vanish_only_at_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let c = random_pd(&mut rng, 4, 0.5);
            assert!(dist_frobenius(&c, &c).unwrap() == 0.0);
            assert!(dist_kl(&c, &c).unwrap().abs() < 1e-12);
            assert!(dist_gelbrich(&c, &c).unwrap() < 1e-6);
            let other = c.add(&random_pd(&mut rng, 4, 0.1).scale(0.1));
            assert!(dist_frobenius(&other, &c).unwrap() > 1e-3);
            assert!(dist_kl(&other, &c).unwrap() > 1e-6);
            assert!(dist_gelbrich(&other, &c).unwrap() > 1e-3);
        }
    }

    #[test]
    fn lower_bound_function() {
        assert_eq!(kl_lower_bound_f(1.0).unwrap(), 0.0);
        let left = (1.5f64 - 1.0).powi(2) / 3.0;
        let right: f64 = 1.5 / 3.0 - 5.0 / 12.0;
        assert!((left - 1.0 / 12.0).abs() < 1e-15 && (right - 1.0 / 12.0).abs() < 1e-15);
        assert!((kl_lower_bound_f(1.5).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!((kl_lower_bound_f(1.5 + 1e-12).unwrap() - 1.0 / 12.0).abs() < 1e-11);
        assert!((kl_lower_bound_f(3.0).unwrap() - 7.0 / 12.0).abs() < 1e-15);
        assert!(kl_lower_bound_f(-0.1).is_err());
        assert!((kl_eigen_radius(1.0 / 24.0) - 0.5).abs() < 1e-15);
        assert!((kl_eigen_radius(1.0) - 6.25).abs() < 1e-15);
    }

    #[test]
    fn gelbrich_bounds_examples() {
        let i2 = SymmetricMatrix::identity(2);
        assert_eq!(gelbrich_strong_convexity_bound(&i2, &i2, 1.0).unwrap(), 0.0);
        let q = SymmetricMatrix::scaled_identity(2, 0.25);
        let gel = dist_gelbrich(&q, &i2).unwrap();
        let bound = gelbrich_strong_convexity_bound(&q, &i2, 1.0).unwrap();
        assert!((gel - 0.5 * 2f64.sqrt()).abs() < 1e-12);
        assert!((bound - 0.75 * 2f64.sqrt() / 3.0).abs() < 1e-12);
        assert!(gel >= bound);
    }

    #[test]
    fn frobenius_type_term_is_not_a_lower_bound() {
        let s = SymmetricMatrix::from_rows(&[
            vec![0.5568773482797593, -0.4276547258784562],
            vec![-0.4276547258784562, 0.32841803519416907],
        ])
        .unwrap();
        let c = SymmetricMatrix::from_rows(&[
            vec![0.034915278563864484, 0.0138249849927959],
            vec![0.0138249849927959, 0.005474113852519618],
        ])
        .unwrap();
        let gel = dist_gelbrich(&s, &c).unwrap();
        assert!(gelbrich_lower_bound(&s, &c).unwrap() <= gel);

        let cross = linalg::sqrt_psd(&linalg::sqrt_psd(&c).unwrap().sandwich(&s)).unwrap();
        let upper = linalg::lambda_max(&s.add(&c).add(&cross.scale(2.0))).unwrap();
        let term = s.sub(&c).frobenius_norm() / upper.sqrt();
        assert!(term > 1.04 * gel, "{term} vs {gel}");
    }

    #[test]
    fn ball_membership() {
        let c = SymmetricMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        for kind in DistanceKind::ALL {
            let ball = AmbiguityBall::new(c.clone(), 0.3, kind).unwrap();
            assert!(in_ball(&c, &ball));
        }
        let eps = 0.3;
        let ball = AmbiguityBall::new(c.clone(), eps, DistanceKind::Frobenius).unwrap();
        let far = c.add(&diag(&[2.0 * eps, 0.0]));
        assert!(!in_ball(&far, &ball));
        // indefinite matrices are never members, even if close
        let small = AmbiguityBall::new(diag(&[1.0, 0.0]), 1.0, DistanceKind::Frobenius).unwrap();
        assert!(!in_ball(&diag(&[1.0, -0.1]), &small));

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let center = random_pd(&mut rng, 3, 2.0);
        let ball = AmbiguityBall::new(center.clone(), 0.5, DistanceKind::Frobenius).unwrap();
        for _ in 0..20 {
            let u = random_symmetric(&mut rng, 3, 1.0);
            let boundary = center.add_scaled(0.5 / u.frobenius_norm(), &u);
            assert!(in_ball(&boundary, &ball));
            let outside = center.add_scaled(0.5 * (1.0 + 1e-5) / u.frobenius_norm(), &u);
            assert!(!in_ball(&outside, &ball));
        }
    }

    #[test]
    fn ball_validation() {
        let i2 = SymmetricMatrix::identity(2);
        assert!(matches!(
            AmbiguityBall::new(i2.clone(), -1.0, DistanceKind::Frobenius),
            Err(DistanceError::InvalidRadius(_))
        ));
        assert!(matches!(
            AmbiguityBall::new(diag(&[1.0, 0.0]), 1.0, DistanceKind::Kl),
            Err(DistanceError::SingularReference { .. })
        ));
        assert!(AmbiguityBall::new(diag(&[1.0, 0.0]), 1.0, DistanceKind::Gelbrich).is_ok());
        assert!(matches!(
            AmbiguityBall::new(diag(&[1.0, -1.0]), 1.0, DistanceKind::Gelbrich),
            Err(DistanceError::Indefinite { .. })
        ));
        assert_eq!("KL".parse::<DistanceKind>().unwrap(), DistanceKind::Kl);
        assert!("hellinger".parse::<DistanceKind>().is_err());
    }
}
