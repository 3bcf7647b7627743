//! Thin command-line front end for the batch driver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wetting_lab::config::{RunConfig, SUITE_NAMES};
use wetting_lab::runner;

#[derive(Parser)]
#[command(name = "wetting-lab", version, about = "Wetting-model simulation lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite described by a TOML config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the experiment named in the config.
        #[arg(long)]
        suite: Option<String>,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (defaults to the config's out_dir, then ".").
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available suites.
    ListSuites,
}

fn main() -> ExitCode {
    env_logger::init();
    match Cli::parse().command {
        Command::ListSuites => {
            for (name, blurb) in SUITE_NAMES {
                println!("{name:<14} {blurb}");
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            suite,
            seed,
            out,
        } => {
            let mut cfg = match RunConfig::from_path(&config) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(suite) = suite {
                cfg.experiment = suite;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Err(e) = cfg.validate() {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            let out_dir = out
                .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            match runner::run(&cfg, &out_dir) {
                Ok(artifacts) => {
                    println!(
                        "{}: {} rows -> {}",
                        cfg.experiment,
                        artifacts.rows.len(),
                        artifacts.results_path.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
