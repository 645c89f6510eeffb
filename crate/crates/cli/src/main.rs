//! `decoupler <mode> --config <path> [--seed N] [--samples N] [--out <dir>]`
//!
//! Writes `<mode>.json` (and `<mode>.csv` for region modes) into the output
//! directory. Exit codes: 0 on success, 2 on invalid input, 3 when the
//! numerics fail. `DECOUPLER_THREADS` caps the worker pool; results do not
//! depend on it.

mod builtins;
mod config;
mod error;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::config::{ExperimentConfig, Mode};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "decoupler", version, about = "Multi-sender decoupling experiments")]
struct Args {
    #[arg(value_enum)]
    mode: Mode,
    /// JSON experiment config; optional for `catalog`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `samples` in the config.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("DECOUPLER_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::invalid(format!(
            "DECOUPLER_THREADS: expected a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::invalid(format!("DECOUPLER_THREADS: {e}")))
}

fn execute(args: &Args) -> CliResult<()> {
    configure_threads()?;
    let mut cfg = match (&args.config, args.mode) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Mode::Catalog) => ExperimentConfig::default(),
        (None, m) => {
            return Err(CliError::invalid(format!(
                "--config: required by mode `{}`",
                m.name()
            )))
        }
    };
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    if args.samples.is_some() {
        cfg.samples = args.samples;
    }
    let outcome = run::run(args.mode, &cfg)?;
    if let Some(text) = &outcome.listing {
        print!("{text}");
    }
    let dir = match (
        args.out
            .clone()
            .or_else(|| cfg.output.as_ref().map(PathBuf::from)),
        &outcome.listing,
    ) {
        (Some(d), _) => d,
        // listings go to the terminal unless a directory is asked for
        (None, Some(_)) => return Ok(()),
        (None, None) => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::invalid(format!("--out `{}`: {e}", dir.display())))?;
    for (name, contents) in outcome.artifacts {
        let path = dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::invalid(format!("--out `{}`: {e}", path.display())))?;
        if outcome.listing.is_none() {
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("decoupler: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
