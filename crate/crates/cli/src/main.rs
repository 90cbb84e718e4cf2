//! `spiderlab <kind> --config <file> [--seed N] [--out DIR]`
//!
//! Exit status: 0 when every verdict passes, 1 when one fails (or the run
//! breaks down numerically), 2 for a bad command line or config.
//! `SPIDERLAB_MAX_THREADS` caps the number of worker threads.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spiderlab::experiment::{run_experiment, write_outputs, ExperimentConfig, ExperimentKind};
use spiderlab::Error;

const THREADS_VAR: &str = "SPIDERLAB_MAX_THREADS";

#[derive(Parser, Debug)]
#[command(name = "spiderlab", version, about = "Penalized Walsh spider experiments")]
struct Args {
    /// simulate, verify-martingale, verify-z, verify-limit-law, theorem3,
    /// tables, verify-majorant, verify-local-time-law, verify-theta,
    /// verify-asymptotic, verify-penalized or reproducibility
    kind: String,

    /// Flat `key = value` experiment file.
    #[arg(long)]
    config: PathBuf,

    /// Overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory, created if missing.
    #[arg(long, default_value = "spiderlab-out")]
    out: PathBuf,
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("spiderlab: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(raw) = std::env::var_os(THREADS_VAR) {
        let threads = match raw.to_str().and_then(|s| s.trim().parse::<usize>().ok()) {
            Some(t) if t > 0 => t,
            _ => return config_error(format!("{THREADS_VAR} must be a positive integer")),
        };
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            return config_error(format!("cannot start {threads} workers: {e}"));
        }
    }
    let kind: ExperimentKind = match args.kind.parse() {
        Ok(k) => k,
        Err(e) => return config_error(e),
    };
    let mut cfg = match ExperimentConfig::from_file(&args.config) {
        Ok(c) => c,
        Err(e) => return config_error(format!("{}: {e}", args.config.display())),
    };
    if let Some(seed) = args.seed {
        cfg.set("seed", seed);
    }
    let run = match run_experiment(kind, &cfg) {
        Ok(run) => run,
        Err(e @ (Error::Config(_) | Error::InvalidSpace(_) | Error::Domain(_) | Error::RegimeMismatch { .. })) => {
            return config_error(format!("{}: {e}", args.config.display()))
        }
        Err(e) => {
            eprintln!("spiderlab: {kind} failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    for line in &run.summary {
        println!("{line}");
    }
    match write_outputs(&args.out, &run) {
        Ok(manifest) => println!("wrote {} file(s); manifest {}", run.files.len(), manifest.display()),
        Err(e) => {
            eprintln!("spiderlab: {e}");
            return ExitCode::FAILURE;
        }
    }
    if run.passed {
        println!("verdict: pass");
        ExitCode::SUCCESS
    } else {
        println!("verdict: FAIL");
        ExitCode::FAILURE
    }
}
