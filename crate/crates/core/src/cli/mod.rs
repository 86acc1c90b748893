//! Command-line experiment runner.
//!
//! Exit codes: 0 on success, 1 when a solve or an output write fails, 2 for
//! bad input or configuration.

pub mod config;
pub mod io;
pub mod runs;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::datagen::DatagenError;
use crate::distances::DistanceError;
use crate::solver::SolverError;
use config::{ExperimentConfig, Mode, Overrides};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Datagen(#[from] DatagenError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

impl CliError {
    pub fn input(path: &Path, message: impl Into<String>) -> Self {
        CliError::Input { path: path.to_path_buf(), message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input { .. } | CliError::Config(_) => 2,
            CliError::Datagen(DatagenError::InvalidDims { .. } | DatagenError::InvalidOffset(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "robust-factor", version, about = "Robust factor-model covariance estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fixed-length run on synthetic data; writes trace.csv and summary.json.
    Converge(RunArgs),
    /// Estimation error over a radius grid; writes sweep.csv, runs.csv and sweep.json.
    Sweep(RunArgs),
    /// Wall-clock over an (n, epsilon, distance) grid; writes timing.csv.
    Timing(RunArgs),
    /// Solve on an input file; writes solution.json, L.csv, D.csv and Sigma.csv.
    Solve(RunArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

impl Command {
    fn split(self) -> (Mode, RunArgs) {
        match self {
            Command::Converge(a) => (Mode::Convergence, a),
            Command::Sweep(a) => (Mode::Sweep, a),
            Command::Timing(a) => (Mode::Timing, a),
            Command::Solve(a) => (Mode::Solve, a),
        }
    }
}

/// Merges the config file and flags, then validates for `mode`.
pub fn resolve_config(mode: Mode, args: RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::default(),
    };
    args.overrides.apply(&mut cfg);
    cfg.validate(mode)?;
    cfg.mode = Some(mode);
    Ok(cfg)
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_path_buf(), source })
}

/// Runs one subcommand and writes its outputs; returns a short report.
pub fn execute(cli: Cli) -> Result<String, CliError> {
    let (mode, args) = cli.command.split();
    let cfg = resolve_config(mode, args)?;
    let out = cfg.out.clone();
    match mode {
        Mode::Convergence => {
            prepare_out(&out)?;
            let rep = runs::run_convergence(&cfg)?;
            io::write_text(&out.join("trace.csv"), &rep.trace_csv())?;
            io::write_json(&out.join("summary.json"), &rep.summary)?;
            Ok(format!(
                "{} iterations, objective {:e}, wrote {}",
                rep.summary.iterations,
                rep.summary.objective,
                out.join("trace.csv").display()
            ))
        }
        Mode::Sweep => {
            prepare_out(&out)?;
            let rep = runs::run_sweep(&cfg)?;
            io::write_text(&out.join("sweep.csv"), &rep.sweep_csv())?;
            io::write_text(&out.join("runs.csv"), &rep.runs_csv())?;
            io::write_json(&out.join("sweep.json"), &rep)?;
            let mut msg = rep.sweep_csv();
            if let Some((_, best)) = rep.best() {
                msg.push_str(&format!("best epsilon {:e}: mean error {:.4}", best.epsilon, best.mean_err));
            }
            Ok(msg)
        }
        Mode::Timing => {
            prepare_out(&out)?;
            let rows = runs::run_timing(&cfg)?;
            let csv = runs::timing_csv(&rows);
            io::write_text(&out.join("timing.csv"), &csv)?;
            Ok(csv)
        }
        Mode::Solve => {
            let path = cfg.input.clone().expect("validated");
            let data = io::read_input(&path)?;
            let rep = runs::run_solve(&cfg, data)?;
            prepare_out(&out)?;
            io::write_json(&out.join("solution.json"), &rep.summary)?;
            io::write_text(&out.join("L.csv"), &io::matrix_csv(&rep.solution.l))?;
            io::write_text(&out.join("D.csv"), &io::matrix_csv(&rep.solution.d))?;
            io::write_text(&out.join("Sigma.csv"), &io::matrix_csv(&rep.solution.sigma))?;
            Ok(format!(
                "objective {:e} after {} iterations ({}), wrote {}",
                rep.summary.objective,
                rep.summary.iterations,
                rep.summary.status,
                out.display()
            ))
        }
    }
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(report) => {
            println!("{}", report.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
