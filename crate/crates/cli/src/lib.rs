//! Configuration, experiment dispatch and reporting for the `stablab` runner.
//!
//! [`run_experiment`] is pure: it returns the report together with the
//! artifact contents, and [`write_outputs`] puts them on disk.

// Config guards are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod experiments;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use thiserror::Error;

pub use config::{ExperimentConfig, ExperimentName};
pub use report::{Check, ExperimentReport, Status};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("numerical failure: {0}")]
    Numerics(stablab_core::Error),
}

impl RunError {
    /// Process exit code: 2 for configuration and I/O problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io { .. } => 2,
            RunError::Numerics(_) => 1,
        }
    }
}

impl From<stablab_core::Error> for RunError {
    fn from(e: stablab_core::Error) -> Self {
        match e {
            // Domain errors come from parameters outside a solver's range.
            stablab_core::Error::Domain(msg) => RunError::Config(msg),
            other => RunError::Numerics(other),
        }
    }
}

/// A named artifact produced by an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: ExperimentReport,
    pub artifacts: Vec<Artifact>,
}

fn echo(cfg: &ExperimentConfig) -> Value {
    let full = serde_json::to_value(cfg).expect("config is serializable");
    let key = cfg.experiment.as_str().replace('-', "_");
    let mut m = Map::new();
    for k in ["experiment", "seed", "tolerances", key.as_str()] {
        if let Some(v) = full.get(k) {
            m.insert(k.to_string(), v.clone());
        }
    }
    Value::Object(m)
}

/// Validates `cfg`, runs the named experiment and assembles its report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    cfg.validate()?;
    let (checks, artifacts) = experiments::dispatch(cfg)?;
    let names = artifacts.iter().map(|a| a.name.clone()).collect();
    let report = ExperimentReport::new(cfg.experiment.as_str(), echo(cfg), checks, names);
    Ok(Outcome { report, artifacts })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    fs::write(path, bytes).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

/// Writes `<experiment>.json`, `.csv`, `.txt` and the artifacts into `dir`.
/// Returns the written paths.
pub fn write_outputs(dir: &Path, outcome: &Outcome, human: &str) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.to_path_buf(), source })?;
    let stem = &outcome.report.experiment;
    let mut written = Vec::new();
    let files = [
        (format!("{stem}.json"), outcome.report.to_json().into_bytes()),
        (format!("{stem}.csv"), outcome.report.to_csv().into_bytes()),
        (format!("{stem}.txt"), human.as_bytes().to_vec()),
    ];
    for (name, bytes) in files.iter() {
        let p = dir.join(name);
        write(&p, bytes)?;
        written.push(p);
    }
    for a in &outcome.artifacts {
        let p = dir.join(&a.name);
        write(&p, &a.contents)?;
        written.push(p);
    }
    Ok(written)
}
