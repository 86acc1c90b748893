//! Experiment configuration: a JSON document whose fields can each be
//! overridden by a command-line flag of the same name.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::datagen::{CovarianceCenter, DEFAULT_OFFSET};
use crate::distances::DistanceKind;
use crate::solver::{SolverConfig, Stepsize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Convergence,
    Sweep,
    Timing,
    Solve,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Convergence => "convergence",
            Mode::Sweep => "sweep",
            Mode::Timing => "timing",
            Mode::Solve => "solve",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StepsizeKind {
    #[default]
    Diminishing,
    Constant,
}

impl std::str::FromStr for StepsizeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "diminishing" => Ok(StepsizeKind::Diminishing),
            "constant" => Ok(StepsizeKind::Constant),
            other => Err(format!("unknown stepsize kind '{other}' (expected diminishing or constant)")),
        }
    }
}

/// The sweep grid `{0.01 * sqrt(10)^i : i = 0..=10}`, from 0.01 to 1000.
pub fn default_epsilon_grid() -> Vec<f64> {
    (0..=10).map(|i| 0.01 * 10f64.sqrt().powi(i)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Set from the subcommand; a config file may name it but must agree.
    pub mode: Option<Mode>,
    pub distance: DistanceKind,
    /// Distances for `timing`; empty means `[distance]`.
    pub distances: Vec<DistanceKind>,
    pub epsilon: f64,
    /// Radius grid for `sweep` and `timing`. Empty means the default grid
    /// for `sweep` and `[epsilon]` for `timing`.
    pub epsilons: Vec<f64>,
    pub n: usize,
    pub r: usize,
    /// Samples per experiment; `None` means `15 n`.
    pub samples: Option<usize>,
    pub n_exp: usize,
    pub n_grid: Vec<usize>,
    pub gt_seed: u64,
    /// Experiment `k` of a sweep draws its samples with seed `sample_seed + k`.
    pub sample_seed: u64,
    pub offset: f64,
    pub center: CovarianceCenter,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub stepsize: f64,
    pub stepsize_kind: StepsizeKind,
    pub dykstra_tol: f64,
    pub dykstra_max_iters: usize,
    pub checkpoint_every: usize,
    pub tol_cs: f64,
    /// When false every wall-clock column is written as 0, which makes all
    /// outputs reproducible byte for byte.
    pub record_timing: bool,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        Self {
            mode: None,
            distance: DistanceKind::Frobenius,
            distances: Vec::new(),
            epsilon: 1.0,
            epsilons: Vec::new(),
            n: 20,
            r: 4,
            samples: None,
            n_exp: 20,
            n_grid: vec![10, 20, 50],
            gt_seed: 1,
            sample_seed: 2,
            offset: DEFAULT_OFFSET,
            center: CovarianceCenter::SampleMean,
            max_iters: solver.max_iters,
            rel_tol: solver.rel_tol,
            stepsize: 1.0,
            stepsize_kind: StepsizeKind::Diminishing,
            dykstra_tol: solver.dykstra_tol,
            dykstra_max_iters: solver.dykstra_max_iters,
            checkpoint_every: solver.checkpoint_every,
            tol_cs: solver.tol_cs,
            record_timing: true,
            input: None,
            out: PathBuf::from("."),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| CliError::input(path, e.to_string()))
    }

    /// Number of samples per experiment for dimension `n`.
    pub fn sample_count(&self, n: usize) -> usize {
        self.samples.unwrap_or(15 * n)
    }

    pub fn sweep_grid(&self) -> Vec<f64> {
        if self.epsilons.is_empty() {
            default_epsilon_grid()
        } else {
            self.epsilons.clone()
        }
    }

    pub fn timing_grid(&self) -> Vec<f64> {
        if self.epsilons.is_empty() {
            vec![self.epsilon]
        } else {
            self.epsilons.clone()
        }
    }

    pub fn timing_distances(&self) -> Vec<DistanceKind> {
        if self.distances.is_empty() {
            vec![self.distance]
        } else {
            self.distances.clone()
        }
    }

    pub fn solver_config(&self, use_stopping_rule: bool) -> SolverConfig {
        let stepsize = match self.stepsize_kind {
            StepsizeKind::Diminishing => Stepsize::Diminishing(self.stepsize),
            StepsizeKind::Constant => Stepsize::Constant(self.stepsize),
        };
        SolverConfig {
            stepsize,
            max_iters: self.max_iters,
            rel_tol: self.rel_tol,
            dykstra_tol: self.dykstra_tol,
            dykstra_max_iters: self.dykstra_max_iters,
            checkpoint_every: self.checkpoint_every,
            use_stopping_rule,
            record_timing: self.record_timing,
            tol_cs: self.tol_cs,
        }
    }

    /// Checks the fields that `mode` reads.
    pub fn validate(&self, mode: Mode) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if let Some(m) = self.mode {
            if m != mode {
                return bad(format!("config file is for mode '{}' but '{}' was requested", m.as_str(), mode.as_str()));
            }
        }
        let radius_ok = |e: f64| e.is_finite() && e >= 0.0;
        if !radius_ok(self.epsilon) {
            return bad(format!("epsilon must be finite and nonnegative, got {}", self.epsilon));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !radius_ok(**e)) {
            return bad(format!("epsilons must be finite and nonnegative, got {e}"));
        }
        if self.samples == Some(0) {
            return bad("samples must be at least 1".into());
        }
        match mode {
            Mode::Convergence | Mode::Sweep => self.check_dims(self.n)?,
            Mode::Timing => {
                if self.n_grid.is_empty() {
                    return bad("n_grid must not be empty".into());
                }
                for &n in &self.n_grid {
                    self.check_dims(n)?;
                }
            }
            Mode::Solve => {
                if self.input.is_none() {
                    return bad("solve needs an input file (--input)".into());
                }
            }
        }
        if mode == Mode::Sweep && self.n_exp == 0 {
            return bad("n_exp must be at least 1".into());
        }
        self.solver_config(true).validate().map_err(|e| CliError::Config(e.to_string()))
    }

    fn check_dims(&self, n: usize) -> Result<(), CliError> {
        if !(self.r >= 1 && n > self.r) {
            return Err(CliError::Config(format!("need n > r >= 1, got n = {n}, r = {}", self.r)));
        }
        if !(self.offset.is_finite() && self.offset >= 0.0) {
            return Err(CliError::Config(format!("offset must be finite and nonnegative, got {}", self.offset)));
        }
        Ok(())
    }
}

/// Command-line overrides; every flag mirrors a config field.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    #[arg(long)]
    pub distance: Option<DistanceKind>,
    #[arg(long, value_delimiter = ',')]
    pub distances: Option<Vec<DistanceKind>>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub n_exp: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    #[arg(long)]
    pub gt_seed: Option<u64>,
    #[arg(long)]
    pub sample_seed: Option<u64>,
    #[arg(long)]
    pub offset: Option<f64>,
    #[arg(long)]
    pub center: Option<CovarianceCenter>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub stepsize: Option<f64>,
    #[arg(long)]
    pub stepsize_kind: Option<StepsizeKind>,
    #[arg(long)]
    pub dykstra_tol: Option<f64>,
    #[arg(long)]
    pub dykstra_max_iters: Option<usize>,
    #[arg(long)]
    pub checkpoint_every: Option<usize>,
    #[arg(long)]
    pub tol_cs: Option<f64>,
    #[arg(long)]
    pub record_timing: Option<bool>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(self, cfg: &mut ExperimentConfig) {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        set!(
            distance,
            distances,
            epsilon,
            epsilons,
            n,
            r,
            n_exp,
            n_grid,
            gt_seed,
            sample_seed,
            offset,
            center,
            max_iters,
            rel_tol,
            stepsize,
            stepsize_kind,
            dykstra_tol,
            dykstra_max_iters,
            checkpoint_every,
            tol_cs,
            record_timing,
            out
        );
        if self.samples.is_some() {
            cfg.samples = self.samples;
        }
        if self.input.is_some() {
            cfg.input = self.input;
        }
    }
}
