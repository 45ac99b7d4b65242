//! Command-line front end: run, validate and list scenarios.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use molring::scenarios::{list_scenarios, parse_config, run_scenario, MANIFEST_FILE};

/// Output directory used when neither `--out-dir` nor the config sets one.
const DEFAULT_OUT_DIR: &str = "molring-out";

#[derive(Debug, Parser)]
#[command(name = "molring", about = "Cooperative radiative dynamics of molecular emitter rings and dimers")]
struct Cli {
    /// Worker threads for sweeps and disorder realizations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write CSV tables, a summary and a manifest.
    Run {
        config: PathBuf,
        /// Output directory (overrides `out_dir` in the config).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Master seed (overrides `seed` in the config).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse and range-check a config; print it with defaults filled in.
    Validate { config: PathBuf },
    /// List the available scenarios.
    ListScenarios,
    /// Print the version.
    Version,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Run { config, out_dir, seed } => run(&config, out_dir, seed),
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!("{}", serde_json::to_string_pretty(&cfg)?);
            Ok(())
        }
        Command::ListScenarios => {
            for (name, description) in list_scenarios() {
                println!("{name:<16} {description}");
            }
            Ok(())
        }
        Command::Version => {
            println!("molring {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<molring::scenarios::ScenarioConfig> {
    parse_config(path).with_context(|| format!("invalid configuration {}", path.display()))
}

fn run(config: &Path, out_dir: Option<PathBuf>, seed: Option<u64>) -> Result<()> {
    let mut cfg = load(config)?;
    if seed.is_some() {
        cfg.seed = seed;
    }
    let dir = out_dir.or_else(|| cfg.out_dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| DEFAULT_OUT_DIR.into());
    let result = run_scenario(&cfg, &dir).with_context(|| format!("scenario `{}` failed", cfg.name()))?;
    for f in &result.manifest.files {
        println!("{} ({})", dir.join(&f.path).display(), f.kind);
    }
    println!("{}", dir.join(MANIFEST_FILE).display());
    Ok(())
}
