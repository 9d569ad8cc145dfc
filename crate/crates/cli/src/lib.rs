//! Scenario runner for weighted kernel inequalities: config parsing, parallel execution
//! and deterministic reports. The binary in `main.rs` is a thin wrapper over [`run_config`],
//! [`sweep_scenario`] and the writers in [`report`].

pub mod config;
pub mod report;
pub mod scenario;

use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

pub use config::{Config, Defaults, Relation, Scenario, Tag};
pub use scenario::{RunReport, Status, SweepRow};

/// Environment variable that takes precedence over `--jobs`.
pub const JOBS_ENV: &str = "SAITOH_LAB_JOBS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("scenario `{id}`: {message}")]
    Config { id: String, message: String },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
}

/// Worker count: the environment variable wins over the flag, which wins over the machine default.
pub fn resolve_jobs(flag: Option<usize>) -> Result<usize, CliError> {
    if let Ok(v) = std::env::var(JOBS_ENV) {
        return match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(k),
            _ => Err(CliError::Invalid(format!(
                "{JOBS_ENV} must be a positive integer, got `{v}`"
            ))),
        };
    }
    match flag {
        Some(0) => Err(CliError::Invalid("--jobs must be positive".into())),
        Some(k) => Ok(k),
        None => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Runs every scenario, `jobs` at a time; results come back ordered by id.
pub fn run_config(config: &Config, jobs: usize) -> Result<Vec<RunReport>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))?;
    let mut reports: Vec<RunReport> = pool.install(|| config.scenarios.par_iter().map(Scenario::run).collect());
    reports.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(reports)
}

/// Exit status contract: success only when every scenario passed.
pub fn all_pass(reports: &[RunReport]) -> bool {
    reports.iter().all(|r| r.status == Status::Pass)
}

/// Writes `report.json`, `report.csv` and `timings.csv` into `dir`.
pub fn write_reports(dir: &Path, reports: &[RunReport]) -> Result<(), CliError> {
    let io = |e: std::io::Error, p: &Path| CliError::Io(format!("cannot write {}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    for (name, body) in [
        ("report.json", report::to_json(reports)),
        ("report.csv", report::to_csv(reports)),
        ("timings.csv", report::timings_csv(reports)),
    ] {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| io(e, &p))?;
    }
    Ok(())
}

/// Result of a convergence sweep.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// `Some` for kernel-valued scenarios: whether both columns are nondecreasing in the degree.
    pub monotone: Option<bool>,
}

/// Relative slack for the monotonicity check of kernel columns.
pub const MONOTONE_SLACK: f64 = 1e-10;

pub fn sweep_scenario(config: &Config, id: &str, degrees: &[usize]) -> Result<Sweep, CliError> {
    let s = config.scenario(id)?;
    if degrees.is_empty() {
        return Err(CliError::Invalid("no degrees given".into()));
    }
    let rows = s.sweep(degrees).map_err(|message| CliError::Config {
        id: id.to_string(),
        message,
    })?;
    let monotone = s.tag.kernel_valued().then(|| {
        let mut sorted = rows.clone();
        sorted.sort_by_key(|r| r.degree);
        let lhs: Vec<f64> = sorted.iter().map(|r| r.lhs).collect();
        let rhs: Vec<f64> = sorted.iter().map(|r| r.rhs).collect();
        report::nondecreasing(&lhs, MONOTONE_SLACK) && report::nondecreasing(&rhs, MONOTONE_SLACK)
    });
    Ok(Sweep { rows, monotone })
}
