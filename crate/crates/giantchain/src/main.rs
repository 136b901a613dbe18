use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use giantchain::{output, CliError, ExperimentConfig, Result, CHECK_CONFIG};

#[derive(Parser)]
#[command(version, about = "Giant-atom waveguide experiments: INI in, CSV out")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the configuration.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Worker threads; falls back to GIANTCHAIN_THREADS, then the core count.
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides `seed` from the configuration.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare the chain, MPS and single-excitation paths against exact
    /// diagonalization on a small built-in system.
    Check {
        /// Also write oracle.csv here.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            output_dir,
            threads,
            seed,
        } => {
            let mut cfg = giantchain::load_config(&config)?;
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let threads = giantchain::resolve_threads(threads)?;
            log::info!("{} on {threads} thread(s)", cfg.kind.name());
            for path in giantchain::execute(&cfg, threads)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Check { output_dir, threads } => {
            let mut cfg: ExperimentConfig = CHECK_CONFIG.parse().map_err(|source| CliError::Config {
                path: "<built-in check>".into(),
                source,
            })?;
            let threads = giantchain::resolve_threads(threads)?;
            let tables = giantchain::compute(&cfg, threads)?;
            let table = &tables[0];
            let mut failed = 0;
            for row in &table.rows {
                let [output::Cell::Text(name), output::Cell::Real(v), output::Cell::Real(tol), output::Cell::Int(pass)] =
                    &row[..]
                else {
                    continue;
                };
                let verdict = if *pass == 1 { "ok" } else { "FAIL" };
                failed += (*pass != 1) as usize;
                println!("{name:<24} {v:.3e} (tolerance {tol:.0e}) {verdict}");
            }
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
                output::write_tables(&cfg.output_dir, &tables, &giantchain::header(&cfg))?;
            }
            if failed > 0 {
                return Err(CliError::CheckFailed(failed));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
