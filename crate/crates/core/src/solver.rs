//! Saddle-point solver for `min Tr L` over `L >= 0`, `D >= 0` diagonal with
//! `L + D` in the ambiguity ball.
//!
//! Each iteration calls the oracle at the current multiplier, takes a
//! projected ascent step, and keeps a running average of the multipliers.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distances::AmbiguityBall;
use crate::linalg::{eig_sym, psd_project, LinalgError, SymmetricMatrix};
use crate::oracles::{lipschitz_bound, lmo, OracleError};
use crate::projection::{dykstra_project, feasibility_violation, DEFAULT_DYKSTRA_MAX_ITERS, DEFAULT_DYKSTRA_TOL};

/// `|objective|` below which the stopping rule uses the absolute change.
pub const STOPPING_ZERO: f64 = 1e-12;
pub const DEFAULT_TOL_CS: f64 = 1e-6;
const RECOVERY_ROUNDS: usize = 500;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("initial multiplier is infeasible (violation {0:e})")]
    InfeasibleStart(f64),
    #[error("initial multiplier has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("oracle failed at iteration {iteration}: {source}")]
    Oracle { iteration: usize, source: OracleError },
    #[error("projection failed at iteration {iteration}: {source}")]
    Projection { iteration: usize, source: LinalgError },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "c")]
pub enum Stepsize {
    /// `delta_t = c`.
    Constant(f64),
    /// `delta_t = c / sqrt(t)`.
    Diminishing(f64),
}

impl Stepsize {
    pub fn at(self, t: usize) -> f64 {
        match self {
            Stepsize::Constant(c) => c,
            Stepsize::Diminishing(c) => c / (t as f64).sqrt(),
        }
    }

    fn scale(self) -> f64 {
        match self {
            Stepsize::Constant(c) | Stepsize::Diminishing(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub stepsize: Stepsize,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub dykstra_tol: f64,
    pub dykstra_max_iters: usize,
    /// Averaged objective is evaluated every this many iterations.
    pub checkpoint_every: usize,
    pub use_stopping_rule: bool,
    pub record_timing: bool,
    pub tol_cs: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            stepsize: Stepsize::Diminishing(1.0),
            max_iters: 10_000,
            rel_tol: 1e-6,
            dykstra_tol: DEFAULT_DYKSTRA_TOL,
            dykstra_max_iters: DEFAULT_DYKSTRA_MAX_ITERS,
            checkpoint_every: 10,
            use_stopping_rule: true,
            record_timing: true,
            tol_cs: DEFAULT_TOL_CS,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let c = self.stepsize.scale();
        if !(c.is_finite() && c > 0.0) {
            return Err(SolverError::InvalidConfig(format!("stepsize constant must be positive, got {c}")));
        }
        if self.max_iters == 0 {
            return Err(SolverError::InvalidConfig("max_iters must be at least 1".into()));
        }
        if self.checkpoint_every == 0 {
            return Err(SolverError::InvalidConfig("checkpoint_every must be at least 1".into()));
        }
        if !(self.rel_tol >= 0.0 && self.dykstra_tol > 0.0 && self.tol_cs >= 0.0) {
            return Err(SolverError::InvalidConfig("tolerances must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Converged,
    MaxIters,
}

impl SolverStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverStatus::Converged => "converged",
            SolverStatus::MaxIters => "max_iters",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    /// `<Lambda_t, Sigma_t>`.
    pub objective: f64,
    /// `<avg Lambda_t, O(avg Lambda_t)>`, only at checkpoints.
    pub avg_objective: Option<f64>,
    /// Change of `objective` against the previous iteration (relative,
    /// or absolute near zero); absent at `t = 1`.
    pub relative_change: Option<f64>,
    /// Dykstra iterations spent producing `Lambda_{t+1}`.
    pub dykstra_iters: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub records: Vec<IterationRecord>,
    pub status: SolverStatus,
}

impl SolverTrace {
    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }
}

/// Which multiplier the reported solution is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierSource {
    Averaged,
    LastIterate,
}

/// Solver output. Both the averaged and the last multiplier are feasible, so
/// each certifies `J* >= d(Lambda)`; the one with the larger dual value is
/// reported.
#[derive(Debug, Clone)]
pub struct FactorModelSolution {
    /// Oracle answer at `lambda`.
    pub sigma: SymmetricMatrix,
    pub lambda: SymmetricMatrix,
    pub source: MultiplierSource,
    /// `d` at the averaged multiplier, reported whichever source wins.
    pub averaged_objective: f64,
    pub lambda_avg: SymmetricMatrix,
    pub lambda_last: SymmetricMatrix,
    pub l: SymmetricMatrix,
    pub d: SymmetricMatrix,
    pub objective: f64,
    pub recovery_residual: f64,
    pub bound: BoundEstimate,
    pub iterations: usize,
    pub status: SolverStatus,
}

/// Runs the projected saddle-point iteration from `lambda1` (default 0).
pub fn solve(
    ball: &AmbiguityBall,
    config: &SolverConfig,
    lambda1: Option<&SymmetricMatrix>,
) -> Result<(FactorModelSolution, SolverTrace), SolverError> {
    config.validate()?;
    let n = ball.dim();
    let start = match lambda1 {
        Some(l) => {
            if l.dim() != n {
                return Err(SolverError::DimensionMismatch { expected: n, got: l.dim() });
            }
            let violation = feasibility_violation(l)?;
            if violation > config.dykstra_tol {
                return Err(SolverError::InfeasibleStart(violation));
            }
            l.clone()
        }
        None => SymmetricMatrix::zeros(n),
    };

    let clock = Instant::now();
    let mut lambda = start.clone();
    let mut average = SymmetricMatrix::zeros(n);
    let mut records = Vec::with_capacity(config.max_iters.min(100_000));
    let mut previous: Option<f64> = None;
    let mut status = SolverStatus::MaxIters;

    for t in 1..=config.max_iters {
        let out = lmo(&lambda, ball).map_err(|source| SolverError::Oracle { iteration: t, source })?;
        let objective = out.dual_value;
        let weight = 1.0 / t as f64;
        average = average.scale(1.0 - weight).add_scaled(weight, &lambda);

        let relative_change = previous.map(|prev| {
            let change = (objective - prev).abs();
            if objective.abs() < STOPPING_ZERO {
                change
            } else {
                change / objective.abs()
            }
        });
        previous = Some(objective);
        let stop = config.use_stopping_rule && relative_change.is_some_and(|c| c <= config.rel_tol);
        let last = stop || t == config.max_iters;

        let avg_objective = if t % config.checkpoint_every == 0 || last {
            let avg_out = lmo(&average, ball).map_err(|source| SolverError::Oracle { iteration: t, source })?;
            Some(avg_out.dual_value)
        } else {
            None
        };

        let mut dykstra_iters = 0;
        if !last {
            let step = lambda.add_scaled(config.stepsize.at(t), &out.minimizer);
            let projected = dykstra_project(&step, config.dykstra_max_iters, config.dykstra_tol)
                .map_err(|source| SolverError::Projection { iteration: t, source })?;
            dykstra_iters = projected.iterations;
            lambda = projected.primal;
        }

        let elapsed_ms = if config.record_timing { clock.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
        records.push(IterationRecord { t, objective, avg_objective, relative_change, dykstra_iters, elapsed_ms });
        if stop {
            status = SolverStatus::Converged;
            break;
        }
    }

    let iterations = records.len();
    let oracle_err = |source| SolverError::Oracle { iteration: iterations, source };
    let averaged = lmo(&average, ball).map_err(oracle_err)?;
    let latest = lmo(&lambda, ball).map_err(oracle_err)?;
    let (source, sigma, multiplier) = if latest.dual_value > averaged.dual_value {
        (MultiplierSource::LastIterate, latest.minimizer, lambda.clone())
    } else {
        (MultiplierSource::Averaged, averaged.minimizer, average.clone())
    };
    let objective = multiplier.inner(&sigma);
    let recovery = recover_decomposition(&sigma, &multiplier, Some(&lambda), config.tol_cs)?;
    let radius = start.sub(&lambda).frobenius_norm();
    let bound = suboptimality_bound(ball, config.stepsize, iterations, BoundRadius::Observed(radius));

    let solution = FactorModelSolution {
        sigma,
        lambda: multiplier,
        source,
        averaged_objective: averaged.dual_value,
        lambda_avg: average,
        lambda_last: lambda,
        l: recovery.l,
        d: recovery.d,
        objective,
        recovery_residual: recovery.residual,
        bound,
        iterations,
        status,
    };
    Ok((solution, SolverTrace { records, status }))
}

/// Radius standing in for `||Lambda_1 - Lambda*||_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundRadius {
    /// Known bound supplied by the caller.
    Given(f64),
    /// Distance travelled by the iterates; a heuristic proxy.
    Observed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEstimate {
    pub value: f64,
    pub radius: f64,
    pub stepsize: f64,
    pub lipschitz: f64,
    /// True when the radius is observed or the stepsize is diminishing.
    pub heuristic: bool,
}

/// `R^2 / (2 delta T) + (delta / 2) L^2` with `L` the ball's Lipschitz bound.
/// A diminishing schedule is evaluated at `delta = c / sqrt(T)`.
pub fn suboptimality_bound(ball: &AmbiguityBall, stepsize: Stepsize, iterations: usize, radius: BoundRadius) -> BoundEstimate {
    let t = iterations.max(1);
    let delta = stepsize.at(t);
    let (r, observed) = match radius {
        BoundRadius::Given(r) => (r, false),
        BoundRadius::Observed(r) => (r, true),
    };
    let lipschitz = lipschitz_bound(ball).value;
    let value = r * r / (2.0 * delta * t as f64) + 0.5 * delta * lipschitz * lipschitz;
    BoundEstimate {
        value,
        radius: r,
        stepsize: delta,
        lipschitz,
        heuristic: observed || matches!(stepsize, Stepsize::Diminishing(_)),
    }
}

#[derive(Debug, Clone)]
pub struct Recovery {
    pub l: SymmetricMatrix,
    pub d: SymmetricMatrix,
    pub residual: f64,
}

/// Splits `sigma` into `L >= 0` plus nonnegative diagonal `D`.
///
/// `L` is first sought inside the eigenvalue-1 eigenspace of the multiplier
/// (complementary slackness confines it there at the saddle), for the
/// averaged multiplier and for `hint` if given. An unrestricted alternation
/// `L <- psd(sigma - D)`, `D <- max(diag(sigma - L), 0)` competes with those.
/// The candidate with the smallest residual wins; residuals within
/// `1e-6 max(1, ||sigma||_F)` of each other are tied and the smaller trace wins.
pub fn recover_decomposition(
    sigma: &SymmetricMatrix,
    lambda: &SymmetricMatrix,
    hint: Option<&SymmetricMatrix>,
    tol_cs: f64,
) -> Result<Recovery, LinalgError> {
    let tie = 1e-6 * sigma.frobenius_norm().max(1.0);
    let mut candidates = Vec::new();
    for multiplier in std::iter::once(lambda).chain(hint) {
        let projector = top_eigenspace(multiplier, tol_cs)?;
        candidates.push(alternate(sigma, Some(&projector))?);
    }
    candidates.push(alternate(sigma, None)?);

    let mut best = candidates.swap_remove(0);
    for cand in candidates {
        let better = cand.residual < best.residual - tie
            || (cand.residual <= best.residual + tie && cand.l.trace() < best.l.trace());
        if better {
            best = cand;
        }
    }
    Ok(best)
}

/// Projector onto eigenvectors with eigenvalue within `tol` of 1.
fn top_eigenspace(lambda: &SymmetricMatrix, tol: f64) -> Result<SymmetricMatrix, LinalgError> {
    let eig = eig_sym(lambda)?;
    let w: Vec<f64> = eig.eigenvalues().iter().map(|&l| if l >= 1.0 - tol { 1.0 } else { 0.0 }).collect();
    Ok(eig.reconstruct_with_weights(&w))
}

fn alternate(sigma: &SymmetricMatrix, projector: Option<&SymmetricMatrix>) -> Result<Recovery, LinalgError> {
    let restrict = |m: &SymmetricMatrix| -> Result<SymmetricMatrix, LinalgError> {
        match projector {
            Some(p) => psd_project(&p.sandwich(m)),
            None => psd_project(m),
        }
    };
    let diag_of = |l: &SymmetricMatrix| SymmetricMatrix::from_diag(&sigma.sub(l).diag().into_iter().map(|v| v.max(0.0)).collect::<Vec<_>>());
    let residual_of = |l: &SymmetricMatrix, d: &SymmetricMatrix| sigma.sub(l).sub(d).frobenius_norm();

    let mut l = restrict(sigma)?;
    let mut d = diag_of(&l);
    let mut best = Recovery { residual: residual_of(&l, &d), l: l.clone(), d: d.clone() };
    let tie = 1e-12 * sigma.frobenius_norm().max(1.0);
    for _ in 0..RECOVERY_ROUNDS {
        let next_l = restrict(&sigma.sub(&d))?;
        let next_d = diag_of(&next_l);
        let moved = next_l.sub(&l).frobenius_norm() + next_d.sub(&d).frobenius_norm();
        l = next_l;
        d = next_d;
        let residual = residual_of(&l, &d);
        if residual < best.residual - tie || (residual <= best.residual + tie && l.trace() < best.l.trace()) {
            best = Recovery { residual, l: l.clone(), d: d.clone() };
        }
        if moved <= 1e-14 * sigma.frobenius_norm().max(1.0) {
            break;
        }
    }
    Ok(best)
}

/// Per-iteration `|objective_t - reference| / |reference|`; the flag is set
/// when `reference` is zero and absolute errors are returned instead.
pub fn convergence_error(objectives: &[f64], reference: f64) -> (Vec<f64>, bool) {
    let absolute = reference == 0.0;
    let errors = objectives
        .iter()
        .map(|&v| if absolute { (v - reference).abs() } else { (v - reference).abs() / reference.abs() })
        .collect();
    (errors, absolute)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distances::DistanceKind;
    use crate::linalg::lambda_min;

    fn frob_ball(center: SymmetricMatrix, eps: f64) -> AmbiguityBall {
        AmbiguityBall::new(center, eps, DistanceKind::Frobenius).unwrap()
    }

    fn two_by_two() -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap()
    }

    #[test]
    fn scalar_problem_has_zero_objective() {
        let ball = frob_ball(SymmetricMatrix::from_diag(&[4.0]), 1.0);
        let (sol, trace) = solve(&ball, &SolverConfig::default(), None).unwrap();
        assert!(sol.objective.abs() < 1e-12);
        assert!(sol.l.get(0, 0).abs() < 1e-12);
        let d = sol.d.get(0, 0);
        assert!((3.0..=5.0).contains(&d), "{d}");
        assert_eq!(trace.status, SolverStatus::Converged);
    }

    #[test]
    fn two_by_two_reaches_trace_two() {
        let ball = frob_ball(two_by_two(), 1e-6);
        let (sol, _) = solve(&ball, &SolverConfig::default(), None).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-2, "{}", sol.objective);
        assert!((sol.l.trace() - 2.0).abs() < 1e-2, "{}", sol.l.trace());
        assert!(sol.recovery_residual < 1e-2);
        assert!(lambda_min(&sol.l).unwrap() > -1e-10);
        assert!(sol.d.diag().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn huge_radius_approaches_zero() {
        // The zero matrix is in the ball, so J* = 0. The dual has a kink at
        // Lambda = 0, and the gap closes like the step length.
        let center = two_by_two();
        let eps = 2.0 * center.frobenius_norm();
        let ball = frob_ball(center, eps);
        let gap = |iters| {
            let config = SolverConfig { max_iters: iters, use_stopping_rule: false, ..SolverConfig::default() };
            let (sol, _) = solve(&ball, &config, None).unwrap();
            assert!(sol.objective <= 1e-12);
            assert!(-sol.objective <= sol.bound.value);
            -sol.objective
        };
        let short = gap(20);
        let long = gap(4000);
        assert!(long < short, "{long} vs {short}");
    }

    #[test]
    fn average_is_mean_of_iterates() {
        // Rebuild the iterates by hand and compare with the solver's average.
        let ball = frob_ball(two_by_two(), 0.3);
        let config = SolverConfig { max_iters: 25, use_stopping_rule: false, ..SolverConfig::default() };
        let (sol, trace) = solve(&ball, &config, None).unwrap();
        let mut lambda = SymmetricMatrix::zeros(2);
        let mut sum = SymmetricMatrix::zeros(2);
        for t in 1..=config.max_iters {
            sum = sum.add(&lambda);
            let out = lmo(&lambda, &ball).unwrap();
            assert_eq!(out.dual_value, trace.records[t - 1].objective);
            let step = lambda.add_scaled(config.stepsize.at(t), &out.minimizer);
            lambda = dykstra_project(&step, config.dykstra_max_iters, config.dykstra_tol).unwrap().primal;
        }
        let mean = sum.scale(1.0 / config.max_iters as f64);
        assert!(mean.sub(&sol.lambda_avg).max_abs() < 1e-10);
    }

    #[test]
    fn iterates_stay_feasible_and_trace_is_contiguous() {
        let ball = AmbiguityBall::new(two_by_two(), 0.5, DistanceKind::Gelbrich).unwrap();
        let config = SolverConfig { max_iters: 40, use_stopping_rule: false, ..SolverConfig::default() };
        let (sol, trace) = solve(&ball, &config, None).unwrap();
        assert!(feasibility_violation(&sol.lambda_last).unwrap() <= 1e-6);
        for (i, r) in trace.records.iter().enumerate() {
            assert_eq!(r.t, i + 1);
            assert_eq!(r.avg_objective.is_some(), r.t % 10 == 0 || r.t == 40);
        }
        assert!(trace.records.windows(2).all(|w| w[0].elapsed_ms <= w[1].elapsed_ms));
    }

    #[test]
    fn deterministic_traces() {
        let ball = AmbiguityBall::new(two_by_two(), 0.2, DistanceKind::Kl).unwrap();
        let config = SolverConfig { max_iters: 60, record_timing: false, ..SolverConfig::default() };
        let (a, ta) = solve(&ball, &config, None).unwrap();
        let (b, tb) = solve(&ball, &config, None).unwrap();
        assert_eq!(ta, tb);
        assert_eq!(a.sigma, b.sigma);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }

    #[test]
    fn weak_duality_against_feasible_primals() {
        // Any D >= 0 with L = psd(center - D) and L + D in the ball bounds J* above.
        for kind in DistanceKind::ALL {
            let center = SymmetricMatrix::from_rows(&[
                vec![3.0, 1.0, 0.5],
                vec![1.0, 2.0, 0.8],
                vec![0.5, 0.8, 2.5],
            ])
            .unwrap();
            let ball = AmbiguityBall::new(center.clone(), 0.05, kind).unwrap();
            let mut upper = f64::INFINITY;
            let steps = 12;
            for a in 0..=steps {
                for b in 0..=steps {
                    for c in 0..=steps {
                        let d = SymmetricMatrix::from_diag(&[
                            3.0 * a as f64 / steps as f64,
                            2.0 * b as f64 / steps as f64,
                            2.5 * c as f64 / steps as f64,
                        ]);
                        let l = psd_project(&center.sub(&d)).unwrap();
                        if ball.contains(&l.add(&d)) {
                            upper = upper.min(l.trace());
                        }
                    }
                }
            }
            assert!(upper.is_finite());
            let config = SolverConfig { max_iters: 300, use_stopping_rule: false, ..SolverConfig::default() };
            let (sol, trace) = solve(&ball, &config, None).unwrap();
            let tol = 1e-6 * upper.max(1.0);
            for r in &trace.records {
                if let Some(v) = r.avg_objective {
                    assert!(v <= upper + tol, "{kind}: {v} > {upper}");
                }
                assert!(r.objective <= upper + tol, "{kind}: {} > {upper}", r.objective);
            }
            assert!(sol.objective <= upper + tol);
        }
    }

    #[test]
    fn recovery_examples() {
        let sigma = SymmetricMatrix::from_diag(&[2.0, 3.0]);
        let r = recover_decomposition(&sigma, &SymmetricMatrix::scaled_identity(2, -1.0), None, DEFAULT_TOL_CS).unwrap();
        assert!(r.l.max_abs() < 1e-12);
        assert!(r.d.sub(&sigma).max_abs() < 1e-12);
        assert!(r.residual < 1e-12);

        let v = [0.6, 0.8];
        let rank1 = SymmetricMatrix::from_fn(2, |i, j| v[i] * v[j]);
        // v spans the eigenvalue-1 space, the orthogonal direction sits at -1.
        let lam = SymmetricMatrix::from_fn(2, |i, j| 2.0 * v[i] * v[j] - if i == j { 1.0 } else { 0.0 });
        let r = recover_decomposition(&rank1, &lam, None, DEFAULT_TOL_CS).unwrap();
        assert!(r.l.sub(&rank1).max_abs() < 1e-10);
        assert!(r.d.max_abs() < 1e-10);
    }

    #[test]
    fn bound_formula() {
        let ball = frob_ball(SymmetricMatrix::identity(2), 1.0);
        let b = suboptimality_bound(&ball, Stepsize::Constant(0.1), 1000, BoundRadius::Given(3.0));
        let expected = 9.0 / 200.0 + 0.05 * (1.0 + 2f64.sqrt()).powi(2);
        assert!((b.value - expected).abs() < 1e-14);
        assert!(!b.heuristic);
        let long = suboptimality_bound(&ball, Stepsize::Constant(0.1), 1 << 40, BoundRadius::Given(3.0));
        assert!((long.value - 0.05 * (1.0 + 2f64.sqrt()).powi(2)).abs() < 1e-9);
        let d = suboptimality_bound(&ball, Stepsize::Diminishing(1.0), 100, BoundRadius::Given(1.0));
        assert!(d.heuristic);
        assert!((d.stepsize - 0.1).abs() < 1e-15);
    }

    #[test]
    fn convergence_error_examples() {
        let (e, abs) = convergence_error(&[2.0, 2.0, 2.0], 2.0);
        assert!(!abs);
        assert!(e.iter().all(|&v| v == 0.0));
        let (e, abs) = convergence_error(&[1.0, -1.0], 0.0);
        assert!(abs);
        assert_eq!(e, vec![1.0, 1.0]);
    }

    #[test]
    fn rejects_bad_configuration() {
        let ball = frob_ball(SymmetricMatrix::identity(2), 1.0);
        let bad = SolverConfig { stepsize: Stepsize::Constant(0.0), ..SolverConfig::default() };
        assert!(matches!(solve(&ball, &bad, None), Err(SolverError::InvalidConfig(_))));
        let infeasible = SymmetricMatrix::identity(2);
        assert!(matches!(
            solve(&ball, &SolverConfig::default(), Some(&infeasible)),
            Err(SolverError::InfeasibleStart(_))
        ));
    }
}
