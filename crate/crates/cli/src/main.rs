use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use stablab::{run_experiment, write_outputs, ExperimentConfig, ExperimentName, RunError};

/// Runs one numerical experiment and writes JSON, CSV and text reports.
#[derive(Debug, Parser)]
#[command(name = "stablab", version)]
struct Args {
    /// TOML configuration file; an empty file selects every default.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the `experiment` key of the configuration.
    #[arg(long)]
    experiment: Option<String>,
    /// Output directory (default: the `out` key, else `stablab-out`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: Args) -> Result<bool, RunError> {
    let text =
        std::fs::read_to_string(&args.config).map_err(|source| RunError::Io { path: args.config.clone(), source })?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if let Some(name) = &args.experiment {
        cfg.experiment = name.parse::<ExperimentName>()?;
    }
    let dir = args.out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("stablab-out"));
    let start = Instant::now();
    let outcome = run_experiment(&cfg)?;
    let elapsed = start.elapsed();
    let human = outcome.report.to_human(None);
    write_outputs(&dir, &outcome, &human)?;
    print!("{}", outcome.report.to_human(Some(elapsed)));
    Ok(outcome.report.passed())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(args) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("stablab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
