//! Dense symmetric linear algebra.
//!
//! Everything in the crate that is a covariance matrix, a multiplier or a
//! factor lives in [`SymmetricMatrix`]. Spectral work goes through a cyclic
//! Jacobi eigensolver, which is slow-ish for large `n` but accurate and fully
//! deterministic at the sizes this crate targets (a few hundred at most).

use std::fmt;

use thiserror::Error;

/// Maximum number of Jacobi sweeps before [`eig_sym`] gives up.
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Off-diagonal mass (relative to `max(1, ||A||_F)`) at which Jacobi stops.
const JACOBI_REL_TOL: f64 = 1e-12;

/// Maximum asymmetry tolerated when building a symmetric matrix from rows.
pub const ASYMMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NotSquare { rows: usize, row: usize, cols: usize },
    #[error("dimension must be positive")]
    EmptyMatrix,
    #[error("entry ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize },
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {gap:e}")]
    NotSymmetric { i: usize, j: usize, gap: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("eigenvalue {eigenvalue:e} outside the domain of the spectral function")]
    Domain { eigenvalue: f64 },
}

/// Positive-definiteness tolerance `1e-10 * max(1, lambda_max)`.
pub fn tol_pd(lambda_max: f64) -> f64 {
    1e-10 * lambda_max.max(1.0)
}

/// Dense `n x n` real symmetric matrix.
///
/// Storage is full row-major, but every constructor and every operation
/// writes both triangles together, so `get(i, j) == get(j, i)` holds exactly.
#[derive(Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl fmt::Debug for SymmetricMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetricMatrix")
            .field("n", &self.n)
            .field("rows", &self.to_rows())
            .finish()
    }
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, value: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = value;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            assert!(d.is_finite(), "non-finite diagonal entry");
            m.data[i * n + i] = d;
        }
        m
    }

    /// Builds a matrix by evaluating `f(i, j)` on the upper triangle only.
    ///
    /// # Panics
    /// If `f` returns a non-finite value.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                assert!(v.is_finite(), "non-finite entry at ({i}, {j})");
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Builds a matrix from rows, rejecting ragged, non-finite or asymmetric
    /// input (asymmetry above [`ASYMMETRY_TOL`] relative to the largest entry).
    /// Tolerated asymmetry is averaged away.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        if n == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(LinalgError::NotSquare { rows: n, row: r, cols: row.len() });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(LinalgError::NonFinite { i: r, j });
            }
        }
        let scale = rows
            .iter()
            .flat_map(|r| r.iter())
            .fold(1.0f64, |acc, v| acc.max(v.abs()));
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (rows[i][j] - rows[j][i]).abs();
                if gap > ASYMMETRY_TOL * scale {
                    return Err(LinalgError::NotSymmetric { i, j, gap });
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| 0.5 * (rows[i][j] + rows[j][i])))
    }

    /// Symmetrizes an arbitrary row-major square buffer as `(A + A^T) / 2`.
    pub(crate) fn symmetrized(n: usize, data: &[f64]) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self::from_fn(n, |i, j| 0.5 * (data[i * n + j] + data[j * n + i]))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Row-major view of the full matrix.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Keeps only the diagonal.
    pub fn diag_part(&self) -> Self {
        Self::from_diag(&self.diag())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j) == 0.0))
    }

    /// Returns a copy with the diagonal replaced entrywise by `f(a_ii)`.
    pub fn map_diag(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            let v = f(out.data[i * self.n + i]);
            assert!(v.is_finite());
            out.data[i * self.n + i] = v;
        }
        out
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.n, other.n, "dimension mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_dim(other);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_dim(other);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Self {
        self.check_dim(other);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + s * b).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `<A, B> = Tr(A^T B)`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.check_dim(other);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Symmetric product `self * other * self`.
    pub fn sandwich(&self, other: &Self) -> Self {
        self.check_dim(other);
        let n = self.n;
        let tmp = matmul(&self.data, &other.data, n);
        let full = matmul(&tmp, &self.data, n);
        Self::symmetrized(n, &full)
    }
}

/// Plain row-major `n x n` product.
pub(crate) fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        let row = &mut out[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let brow = &b[k * n..(k + 1) * n];
            for (o, &bkj) in row.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    out
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Row-major `n x n`; column `k` is the eigenvector of `eigenvalues[k]`.
    vectors: Vec<f64>,
    sweeps: usize,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Component `i` of eigenvector `k`.
    #[inline]
    pub fn vector_entry(&self, i: usize, k: usize) -> f64 {
        self.vectors[i * self.dim() + k]
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        (0..self.dim()).map(|i| self.vector_entry(i, k)).collect()
    }

    /// Number of Jacobi sweeps that were needed.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// `V diag(w) V^T`.
    pub fn reconstruct_with_weights(&self, weights: &[f64]) -> SymmetricMatrix {
        let n = self.dim();
        assert_eq!(weights.len(), n);
        let active: Vec<usize> = (0..n).filter(|&k| weights[k] != 0.0).collect();
        SymmetricMatrix::from_fn(n, |i, j| {
            active
                .iter()
                .map(|&k| weights[k] * self.vector_entry(i, k) * self.vector_entry(j, k))
                .sum()
        })
    }

    /// `V diag(f(lambda)) V^T`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> SymmetricMatrix {
        let w: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.reconstruct_with_weights(&w)
    }

    /// `V^T A V`, i.e. `A` expressed in this eigenbasis.
    pub fn to_basis(&self, a: &SymmetricMatrix) -> SymmetricMatrix {
        let n = self.dim();
        assert_eq!(a.dim(), n);
        let av = matmul(a.as_slice(), &self.vectors, n);
        let vt = transpose(&self.vectors, n);
        SymmetricMatrix::symmetrized(n, &matmul(&vt, &av, n))
    }

    /// `V A V^T`, mapping a matrix given in this eigenbasis back.
    pub fn from_basis(&self, a: &SymmetricMatrix) -> SymmetricMatrix {
        let n = self.dim();
        assert_eq!(a.dim(), n);
        let vt = transpose(&self.vectors, n);
        let av = matmul(a.as_slice(), &vt, n);
        SymmetricMatrix::symmetrized(n, &matmul(&self.vectors, &av, n))
    }

    /// `||V^T V - I||_F`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for p in 0..n {
            for q in 0..n {
                let dot: f64 = (0..n).map(|i| self.vector_entry(i, p) * self.vector_entry(i, q)).sum();
                let target = if p == q { 1.0 } else { 0.0 };
                acc += (dot - target).powi(2);
            }
        }
        acc.sqrt()
    }
}

fn transpose(a: &[f64], n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Stops once the off-diagonal Frobenius mass drops below
/// `1e-12 * max(1, ||A||_F)`; fails after [`MAX_JACOBI_SWEEPS`] sweeps.
pub fn eig_sym(a: &SymmetricMatrix) -> Result<SpectralDecomposition, LinalgError> {
    let n = a.dim();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    jacobi(a.as_slice().to_vec(), v, n, a.frobenius_norm())
}

/// Like [`eig_sym`], but starts the rotations from the orthonormal basis of
/// `guess`. Cheap when `a` is close to diagonal in that basis, as happens for
/// a sequence of slowly changing matrices.
pub fn eig_sym_warm(a: &SymmetricMatrix, guess: &SpectralDecomposition) -> Result<SpectralDecomposition, LinalgError> {
    let n = a.dim();
    if guess.dim() != n {
        return eig_sym(a);
    }
    let v = &guess.vectors;
    let vt = transpose(v, n);
    let mut m = matmul(&vt, &matmul(a.as_slice(), v, n), n);
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = avg;
            m[j * n + i] = avg;
        }
    }
    jacobi(m, v.clone(), n, a.frobenius_norm())
}

fn jacobi(mut m: Vec<f64>, mut v: Vec<f64>, n: usize, norm: f64) -> Result<SpectralDecomposition, LinalgError> {
    let scale = norm.max(1.0);
    let threshold = JACOBI_REL_TOL * scale;

    let off_norm = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += m[i * n + j] * m[i * n + j];
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&m);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_JACOBI_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                // Entries negligible against both diagonal entries are dropped.
                if apq.abs() < f64::EPSILON * 1e-3 * (app.abs().min(aqq.abs())) {
                    m[p * n + q] = 0.0;
                    m[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    let new_kp = akp - s * (akq + tau * akp);
                    let new_kq = akq + s * (akp - tau * akq);
                    m[k * n + p] = new_kp;
                    m[p * n + k] = new_kp;
                    m[k * n + q] = new_kq;
                    m[q * n + k] = new_kq;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp - s * (vkq + tau * vkp);
                    v[k * n + q] = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }

    let raw: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps index order among ties.
    order.sort_by(|&x, &y| raw[y].total_cmp(&raw[x]));
    let eigenvalues = order.iter().map(|&k| raw[k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + dst] = v[i * n + src];
        }
    }
    Ok(SpectralDecomposition { eigenvalues, vectors, sweeps })
}

/// Frobenius projection onto the PSD cone: clamps negative eigenvalues at 0.
pub fn psd_project(a: &SymmetricMatrix) -> Result<SymmetricMatrix, LinalgError> {
    Ok(eig_sym(a)?.reconstruct(|l| l.max(0.0)))
}

/// `V diag(f(lambda)) V^T`, where `f` returns `None` outside its domain.
pub fn spectral_fn(
    a: &SymmetricMatrix,
    f: impl Fn(f64) -> Option<f64>,
) -> Result<SymmetricMatrix, LinalgError> {
    let eig = eig_sym(a)?;
    let mut w = Vec::with_capacity(a.dim());
    for &l in eig.eigenvalues() {
        match f(l) {
            Some(v) if v.is_finite() => w.push(v),
            _ => return Err(LinalgError::Domain { eigenvalue: l }),
        }
    }
    Ok(eig.reconstruct_with_weights(&w))
}

/// Principal square root of a PSD matrix. Eigenvalues in `(-tol_pd, 0)` are
/// treated as zero.
pub fn sqrt_psd(a: &SymmetricMatrix) -> Result<SymmetricMatrix, LinalgError> {
    let eig = eig_sym(a)?;
    sqrt_from_eig(&eig)
}

pub(crate) fn sqrt_from_eig(eig: &SpectralDecomposition) -> Result<SymmetricMatrix, LinalgError> {
    let tol = tol_pd(eig.lambda_max());
    if eig.lambda_min() < -tol {
        return Err(LinalgError::Domain { eigenvalue: eig.lambda_min() });
    }
    Ok(eig.reconstruct(|l| l.max(0.0).sqrt()))
}

/// Inverse of a positive definite matrix.
pub fn inverse_pd(a: &SymmetricMatrix) -> Result<SymmetricMatrix, LinalgError> {
    let eig = eig_sym(a)?;
    let tol = tol_pd(eig.lambda_max());
    spectral_weights(&eig, |l| (l >= tol).then(|| 1.0 / l))
}

/// Inverse square root of a positive definite matrix.
pub fn inv_sqrt_pd(a: &SymmetricMatrix) -> Result<SymmetricMatrix, LinalgError> {
    let eig = eig_sym(a)?;
    let tol = tol_pd(eig.lambda_max());
    spectral_weights(&eig, |l| (l >= tol).then(|| 1.0 / l.sqrt()))
}

fn spectral_weights(
    eig: &SpectralDecomposition,
    f: impl Fn(f64) -> Option<f64>,
) -> Result<SymmetricMatrix, LinalgError> {
    let w = eig
        .eigenvalues()
        .iter()
        .map(|&l| f(l).ok_or(LinalgError::Domain { eigenvalue: l }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(eig.reconstruct_with_weights(&w))
}

pub fn lambda_max(a: &SymmetricMatrix) -> Result<f64, LinalgError> {
    Ok(eig_sym(a)?.lambda_max())
}

pub fn lambda_min(a: &SymmetricMatrix) -> Result<f64, LinalgError> {
    Ok(eig_sym(a)?.lambda_min())
}

/// Sum of absolute eigenvalues.
pub fn nuclear_norm(a: &SymmetricMatrix) -> Result<f64, LinalgError> {
    Ok(eig_sym(a)?.eigenvalues().iter().map(|l| l.abs()).sum())
}

pub fn frobenius_norm(a: &SymmetricMatrix) -> f64 {
    a.frobenius_norm()
}

pub fn inner(a: &SymmetricMatrix, b: &SymmetricMatrix) -> f64 {
    a.inner(b)
}

pub fn trace(a: &SymmetricMatrix) -> f64 {
    a.trace()
}

/// Whether `lambda_min(a) >= -tol_pd`.
pub fn is_psd(a: &SymmetricMatrix) -> Result<bool, LinalgError> {
    let eig = eig_sym(a)?;
    Ok(eig.lambda_min() >= -tol_pd(eig.lambda_max()))
}
