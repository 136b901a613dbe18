//! Configuration-driven experiment runner for `giantchain-core`.
//!
//! A run reads an INI file ([`config`]), refuses anything over its resource
//! limits, computes the requested tables ([`experiments`]) on a bounded
//! thread pool and writes them as CSV ([`output`]), each file headed by the
//! fully resolved configuration.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};

pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use error::{CliError, Result};
pub use output::{Cell, CsvTable};

/// Environment variable consulted for the worker count when no flag is given.
pub const THREADS_ENV: &str = "GIANTCHAIN_THREADS";

/// Small system used by `check`: one three-point atom, four even modes,
/// resonant with the second mode, four boson levels per site.
pub const CHECK_CONFIG: &str = "\
[experiment]
kind = oracle_check
[waveguide]
cutoff = 4
[emitter]
frequency = 4pi
[numerics]
n_b = 4
max_bond = 64
svd_cutoff = 0
dt = 0.001
total_time = 2
stride = 0.05
";

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    text.parse().map_err(|source| CliError::Config {
        path: path.to_path_buf(),
        source,
    })
}

/// Worker count: the flag if given, then [`THREADS_ENV`], else one per core.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                CliError::ResourceCap(format!("{THREADS_ENV} = `{v}` is not a positive integer"))
            })?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if n == 0 {
        return Err(CliError::ResourceCap("thread count must be at least 1".into()));
    }
    Ok(n)
}

/// Header block written above every table of a run.
pub fn header(cfg: &ExperimentConfig) -> String {
    format!(
        "{} {}\nseed = {}\n--- resolved configuration\n{}",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
        cfg.seed,
        cfg.to_ini()
    )
}

/// Checks limits, computes every table on `threads` workers, then writes
/// them all. Nothing is written if any step fails.
pub fn compute(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<CsvTable>> {
    experiments::check_resources(cfg, threads)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    pool.install(|| experiments::run(cfg))
}

pub fn execute(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<PathBuf>> {
    let tables = compute(cfg, threads)?;
    output::write_tables(&cfg.output_dir, &tables, &header(cfg))
}
