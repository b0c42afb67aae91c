//! Command-line front end: reads a JSON run config, runs the requested
//! diagnostics and writes `report.json`, `report.md`, `metadata.json` and
//! `series/*.csv`.
//!
//! Exit status is 0 when every check passes, 2 when a check fails or a
//! computation breaks down, and 1 for usage or configuration errors.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod shipped;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::{Instant, SystemTime};

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;
pub use run::{execute, RunOutput, RunReport};

#[derive(Debug, Parser)]
#[command(name = "endslab", version, about = "Positive solutions and estimates on multi-ended model manifolds")]
pub struct Cli {
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true, env = "ENDSLAB_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a config file or a shipped example by name.
    Run {
        /// Config path or shipped example name.
        #[arg(conflicts_with = "config")]
        target: Option<String>,
        #[arg(long)]
        config: Option<String>,
        /// Output directory; defaults to the config's `output_dir`, then `out/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List shipped examples.
    List,
    /// Re-render the markdown summary of a finished run.
    Report {
        /// Directory holding `report.json`.
        #[arg(conflicts_with = "out")]
        dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Loads, runs and writes one config. Returns the report and output directory.
pub fn run_config(
    source: &str,
    out: Option<PathBuf>,
    seed: Option<u64>,
    jobs: usize,
) -> Result<(RunReport, PathBuf), CliError> {
    let mut cfg = RunConfig::load(source)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let dir = out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
    let started = SystemTime::now();
    let clock = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} workers: {e}")))?;
    let result = pool.install(|| execute(&cfg))?;
    let meta = output::Metadata::new(started, clock.elapsed(), pool.current_num_threads(), source);
    output::write_outputs(&dir, &result, &meta)?;
    Ok((result.report, dir))
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let jobs = cli.jobs.unwrap_or(0);
    match cli.command {
        Command::List => {
            print!("{}", shipped::list_examples());
            0
        }
        Command::Report { dir, out } => {
            let Some(dir) = dir.or(out) else {
                eprintln!("error: report needs a run directory");
                return 1;
            };
            match output::read_report(&dir) {
                Ok(r) => {
                    print!("{}", output::render_markdown(&r));
                    if r.passed { 0 } else { 2 }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Command::Run { target, config, out, seed } => {
            let Some(source) = target.or(config) else {
                eprintln!("error: run needs a config path or a shipped example name");
                return 1;
            };
            match run_config(&source, out, seed, jobs) {
                Ok((report, dir)) => {
                    for c in &report.checks {
                        println!("{:<20} {}  {}", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
                    }
                    for a in &report.advisories {
                        eprintln!("advisory: {a}");
                    }
                    println!("wrote {}", dir.display());
                    if report.passed { 0 } else { 2 }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
    }
}
