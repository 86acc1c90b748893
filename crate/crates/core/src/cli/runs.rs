//! Convergence runs, radius sweeps, timing grids and single solves.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::io::{csv_table, Cell, InputData};
use super::CliError;
use crate::datagen::{empirical_covariance, gen_ground_truth, gen_samples, GroundTruth};
use crate::distances::{dist, AmbiguityBall, DistanceKind};
use crate::linalg::SymmetricMatrix;
use crate::solver::{convergence_error, solve, FactorModelSolution, SolverTrace};

/// The JSON summary written for `converge` and `solve`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub distance: DistanceKind,
    pub epsilon: f64,
    pub objective: f64,
    pub iterations: usize,
    pub status: String,
    pub recovery_residual: f64,
    pub bound_gap: f64,
}

impl Summary {
    fn new(kind: DistanceKind, eps: f64, sol: &FactorModelSolution) -> Self {
        Self {
            distance: kind,
            epsilon: eps,
            objective: sol.objective,
            iterations: sol.iterations,
            status: sol.status.as_str().to_string(),
            recovery_residual: sol.recovery_residual,
            bound_gap: sol.bound.value,
        }
    }
}

fn synthetic_covariance(cfg: &ExperimentConfig, n: usize, sample_seed: u64) -> Result<(GroundTruth, SymmetricMatrix), CliError> {
    let gt = gen_ground_truth(n, cfg.r, cfg.gt_seed, cfg.offset)?;
    let set = gen_samples(&gt, cfg.sample_count(n), sample_seed)?;
    let cov = empirical_covariance(&set, cfg.center);
    Ok((gt, cov))
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub summary: Summary,
    pub trace: SolverTrace,
    /// `|objective_t - objective_T| / |objective_T|`, absolute when the
    /// final objective is zero.
    pub conv_error: Vec<f64>,
    pub absolute_error: bool,
}

impl ConvergenceReport {
    pub fn trace_csv(&self) -> String {
        let rows = self.trace.records.iter().zip(&self.conv_error).map(|(r, &e)| {
            vec![
                Cell::from(r.t),
                Cell::from(r.objective),
                Cell::from(r.avg_objective),
                Cell::from(e),
                Cell::from(r.dykstra_iters),
                Cell::from(r.elapsed_ms),
            ]
        });
        csv_table(&["iter", "objective", "avg_objective", "conv_error", "dykstra_iters", "time_ms"], rows)
    }
}

/// Runs `max_iters` iterations without the stopping rule on synthetic data
/// and measures every iterate against the last one.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceReport, CliError> {
    let (_, cov) = synthetic_covariance(cfg, cfg.n, cfg.sample_seed)?;
    let ball = AmbiguityBall::new(cov, cfg.epsilon, cfg.distance)?;
    let (sol, trace) = solve(&ball, &cfg.solver_config(false), None)?;
    let objectives = trace.objectives();
    let reference = *objectives.last().expect("at least one iteration");
    let (conv_error, absolute_error) = convergence_error(&objectives, reference);
    Ok(ConvergenceReport { summary: Summary::new(cfg.distance, cfg.epsilon, &sol), trace, conv_error, absolute_error })
}

/// Outcome of one `(epsilon, experiment)` solve in a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRun {
    pub epsilon: f64,
    pub experiment: usize,
    /// `dist(Sigma*, Sigma_true) / dist(Sigma_hat, Sigma_true)`; `None` if
    /// the solve failed.
    pub error: Option<f64>,
    pub iterations: usize,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub mean_err: f64,
    pub p5_err: f64,
    pub p95_err: f64,
    /// Share of all runs at this radius with error below 1; failed runs
    /// count as not improved.
    pub improved_frac: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub distance: DistanceKind,
    pub rows: Vec<SweepRow>,
    pub runs: Vec<SweepRun>,
}

impl SweepReport {
    /// Row with the smallest mean error.
    pub fn best(&self) -> Option<(usize, &SweepRow)> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.mean_err.is_finite())
            .min_by(|a, b| a.1.mean_err.total_cmp(&b.1.mean_err))
    }

    /// The smallest mean error sits strictly inside the grid and is below
    /// both endpoint values.
    pub fn has_interior_minimum(&self) -> bool {
        let Some((k, best)) = self.best() else { return false };
        let last = self.rows.len() - 1;
        k > 0 && k < last && best.mean_err < self.rows[0].mean_err && best.mean_err < self.rows[last].mean_err
    }

    pub fn sweep_csv(&self) -> String {
        let rows = self.rows.iter().map(|r| {
            vec![
                Cell::from(r.epsilon),
                Cell::from(r.mean_err),
                Cell::from(r.p5_err),
                Cell::from(r.p95_err),
                Cell::from(r.improved_frac),
            ]
        });
        csv_table(&["epsilon", "mean_err", "p5_err", "p95_err", "improved_frac"], rows)
    }

    pub fn runs_csv(&self) -> String {
        let rows = self.runs.iter().map(|r| {
            vec![
                Cell::from(r.epsilon),
                Cell::from(r.experiment),
                Cell::from(r.error),
                Cell::from(r.iterations),
                Cell::from(r.status.as_str()),
            ]
        });
        csv_table(&["epsilon", "experiment", "error", "iterations", "status"], rows)
    }
}

/// Percentile of sorted data by linear interpolation between order
/// statistics; `p` in `[0, 1]`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        len => {
            let pos = p.clamp(0.0, 1.0) * (len - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(len - 1);
            let w = pos - lo as f64;
            sorted[lo] + w * (sorted[hi] - sorted[lo])
        }
    }
}

fn summarize(epsilon: f64, runs: &[SweepRun]) -> SweepRow {
    let mut errors: Vec<f64> = runs.iter().filter_map(|r| r.error).collect();
    errors.sort_by(f64::total_cmp);
    let failures = runs.len() - errors.len();
    let mean_err = if errors.is_empty() { f64::NAN } else { errors.iter().sum::<f64>() / errors.len() as f64 };
    let improved = errors.iter().filter(|&&e| e < 1.0).count();
    SweepRow {
        epsilon,
        mean_err,
        p5_err: percentile(&errors, 0.05),
        p95_err: percentile(&errors, 0.95),
        improved_frac: improved as f64 / runs.len() as f64,
        failures,
    }
}

/// One ground truth, `n_exp` fresh sample sets, every radius of the grid
/// solved with the stopping rule. Solves run on the rayon pool and are
/// gathered in `(epsilon, experiment)` order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport, CliError> {
    let grid = cfg.sweep_grid();
    let gt = gen_ground_truth(cfg.n, cfg.r, cfg.gt_seed, cfg.offset)?;
    let mut covariances = Vec::with_capacity(cfg.n_exp);
    for k in 0..cfg.n_exp {
        let set = gen_samples(&gt, cfg.sample_count(cfg.n), cfg.sample_seed + k as u64)?;
        let cov = empirical_covariance(&set, cfg.center);
        let baseline = dist(cfg.distance, &cov, &gt.sigma_true)?;
        covariances.push((cov, baseline));
    }
    let solver_cfg = cfg.solver_config(true);
    let tasks: Vec<(f64, usize)> = grid.iter().flat_map(|&e| (0..cfg.n_exp).map(move |k| (e, k))).collect();
    let runs: Vec<SweepRun> = tasks
        .par_iter()
        .map(|&(epsilon, k)| {
            let (cov, baseline) = &covariances[k];
            let outcome = AmbiguityBall::new(cov.clone(), epsilon, cfg.distance)
                .map_err(|e| e.to_string())
                .and_then(|ball| solve(&ball, &solver_cfg, None).map_err(|e| e.to_string()))
                .and_then(|(sol, _)| {
                    let d = dist(cfg.distance, &sol.sigma, &gt.sigma_true).map_err(|e| e.to_string())?;
                    Ok((d / baseline, sol.iterations, sol.status))
                });
            match outcome {
                Ok((error, iterations, status)) => SweepRun {
                    epsilon,
                    experiment: k,
                    error: Some(error),
                    iterations,
                    status: status.as_str().to_string(),
                },
                Err(msg) => SweepRun { epsilon, experiment: k, error: None, iterations: 0, status: format!("failed: {msg}") },
            }
        })
        .collect();
    let rows = runs
        .chunks(cfg.n_exp)
        .zip(&grid)
        .map(|(chunk, &epsilon)| summarize(epsilon, chunk))
        .collect();
    Ok(SweepReport { distance: cfg.distance, rows, runs })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub n: usize,
    pub epsilon: f64,
    pub distance: DistanceKind,
    pub iters: usize,
    pub seconds: f64,
    pub status: String,
}

pub fn timing_csv(rows: &[TimingRow]) -> String {
    let cells = rows.iter().map(|r| {
        vec![
            Cell::from(r.n),
            Cell::from(r.epsilon),
            Cell::from(r.distance.as_str()),
            Cell::from(r.iters),
            Cell::from(r.seconds),
            Cell::from(r.status.as_str()),
        ]
    });
    csv_table(&["n", "epsilon", "distance", "iters", "seconds", "status"], cells)
}

/// Wall-clock of one solve per `(n, epsilon, distance)`, run sequentially so
/// that timings do not compete for cores.
pub fn run_timing(cfg: &ExperimentConfig) -> Result<Vec<TimingRow>, CliError> {
    let solver_cfg = cfg.solver_config(true);
    let mut rows = Vec::new();
    for &n in &cfg.n_grid {
        let (_, cov) = synthetic_covariance(cfg, n, cfg.sample_seed)?;
        for &epsilon in &cfg.timing_grid() {
            for &distance in &cfg.timing_distances() {
                let ball = AmbiguityBall::new(cov.clone(), epsilon, distance)?;
                let clock = Instant::now();
                let result = solve(&ball, &solver_cfg, None);
                let seconds = if cfg.record_timing { clock.elapsed().as_secs_f64() } else { 0.0 };
                let (iters, status) = match result {
                    Ok((sol, _)) => (sol.iterations, sol.status.as_str().to_string()),
                    Err(e) => (0, format!("failed: {e}")),
                };
                rows.push(TimingRow { n, epsilon, distance, iters, seconds, status });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub summary: Summary,
    pub solution: FactorModelSolution,
}

/// Solves on user data: the covariance as given, or the empirical covariance
/// of the samples.
pub fn run_solve(cfg: &ExperimentConfig, data: InputData) -> Result<SolveReport, CliError> {
    let path = cfg.input.clone().unwrap_or_default();
    let cov = match data {
        InputData::Covariance(c) => c,
        InputData::Samples(s) => empirical_covariance(&s, cfg.center),
    };
    let ball = AmbiguityBall::new(cov, cfg.epsilon, cfg.distance).map_err(|e| CliError::input(&path, e.to_string()))?;
    let (solution, _) = solve(&ball, &cfg.solver_config(true), None)?;
    Ok(SolveReport { summary: Summary::new(cfg.distance, cfg.epsilon, &solution), solution })
}
