//! Synthetic factor-model data and the empirical covariance.
//!
//! Every random draw comes from `ChaCha8Rng` seeded with `seed_from_u64`;
//! normals use the ziggurat sampler of `rand_distr::StandardNormal`. Both are
//! fixed algorithms, so output is identical across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{eig_sym, LinalgError, SymmetricMatrix};

pub const DEFAULT_OFFSET: f64 = 5.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatagenError {
    #[error("need n > r >= 1, got n = {n}, r = {r}")]
    InvalidDims { n: usize, r: usize },
    #[error("offset must be finite and nonnegative, got {0}")]
    InvalidOffset(f64),
    #[error("loading matrix is rank deficient (smallest singular value {0:e})")]
    RankDeficient(f64),
    #[error("sample set is empty")]
    NoSamples,
    #[error("sample {index} has length {got}, expected {expected}")]
    RaggedSample { index: usize, expected: usize, got: usize },
    #[error("sample {index} contains a non-finite value")]
    NonFinite { index: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub n: usize,
    pub r: usize,
    /// Row-major `n x r` loadings.
    pub phi: Vec<f64>,
    pub d_true: Vec<f64>,
    pub l_true: SymmetricMatrix,
    pub sigma_true: SymmetricMatrix,
}

impl GroundTruth {
    pub fn phi_entry(&self, i: usize, k: usize) -> f64 {
        self.phi[i * self.r + k]
    }
}

/// Loadings and noise variances uniform on `[offset, offset + 1)`.
pub fn gen_ground_truth(n: usize, r: usize, seed: u64, offset: f64) -> Result<GroundTruth, DatagenError> {
    if r == 0 || n <= r {
        return Err(DatagenError::InvalidDims { n, r });
    }
    if !(offset.is_finite() && offset >= 0.0) {
        return Err(DatagenError::InvalidOffset(offset));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi: Vec<f64> = (0..n * r).map(|_| rng.random::<f64>() + offset).collect();
    let d_true: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + offset).collect();

    let gram = SymmetricMatrix::from_fn(r, |a, b| (0..n).map(|i| phi[i * r + a] * phi[i * r + b]).sum());
    let smallest = eig_sym(&gram)?.lambda_min().max(0.0).sqrt();
    if smallest <= 1e-10 * gram.max_abs().sqrt() {
        return Err(DatagenError::RankDeficient(smallest));
    }

    let l_true = SymmetricMatrix::from_fn(n, |i, j| (0..r).map(|k| phi[i * r + k] * phi[j * r + k]).sum());
    let sigma_true = l_true.add(&SymmetricMatrix::from_diag(&d_true));
    Ok(GroundTruth { n, r, phi, d_true, l_true, sigma_true })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    samples: Vec<Vec<f64>>,
    seed: Option<u64>,
}

impl SampleSet {
    /// Wraps observed vectors, checking they are nonempty, equal length and finite.
    pub fn new(samples: Vec<Vec<f64>>) -> Result<Self, DatagenError> {
        let first = samples.first().ok_or(DatagenError::NoSamples)?;
        let n = first.len();
        if n == 0 {
            return Err(DatagenError::NoSamples);
        }
        for (index, s) in samples.iter().enumerate() {
            if s.len() != n {
                return Err(DatagenError::RaggedSample { index, expected: n, got: s.len() });
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(DatagenError::NonFinite { index });
            }
        }
        Ok(Self { samples, seed: None })
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples[0].len()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

/// `xi = Phi alpha + omega` with `alpha ~ N(0, I_r)` and `omega ~ N(0, D_true)`.
pub fn gen_samples(gt: &GroundTruth, count: usize, seed: u64) -> Result<SampleSet, DatagenError> {
    if count == 0 {
        return Err(DatagenError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise_sd: Vec<f64> = gt.d_true.iter().map(|d| d.sqrt()).collect();
    let samples = (0..count)
        .map(|_| {
            let alpha: Vec<f64> = (0..gt.r).map(|_| rng.sample(StandardNormal)).collect();
            (0..gt.n)
                .map(|i| {
                    let factor: f64 = (0..gt.r).map(|k| gt.phi_entry(i, k) * alpha[k]).sum();
                    let noise: f64 = rng.sample(StandardNormal);
                    factor + noise_sd[i] * noise
                })
                .collect()
        })
        .collect();
    Ok(SampleSet { samples, seed: Some(seed) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceCenter {
    #[default]
    SampleMean,
    Zero,
}

impl std::str::FromStr for CovarianceCenter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sample_mean" | "mean" => Ok(CovarianceCenter::SampleMean),
            "zero" => Ok(CovarianceCenter::Zero),
            other => Err(format!("unknown centering '{other}' (expected sample_mean or zero)")),
        }
    }
}

/// `(1/N) sum (xi - mu)(xi - mu)^T`, with `mu` the sample mean or zero.
pub fn empirical_covariance(set: &SampleSet, center: CovarianceCenter) -> SymmetricMatrix {
    let n = set.dim();
    let count = set.len() as f64;
    let mean: Vec<f64> = match center {
        CovarianceCenter::SampleMean => {
            (0..n).map(|i| set.samples.iter().map(|s| s[i]).sum::<f64>() / count).collect()
        }
        CovarianceCenter::Zero => vec![0.0; n],
    };
    let mut acc = vec![0.0; n * n];
    let mut centered = vec![0.0; n];
    for s in &set.samples {
        for i in 0..n {
            centered[i] = s[i] - mean[i];
        }
        for i in 0..n {
            let ci = centered[i];
            for j in i..n {
                acc[i * n + j] += ci * centered[j];
            }
        }
    }
    SymmetricMatrix::from_fn(n, |i, j| acc[i * n + j] / count)
}
