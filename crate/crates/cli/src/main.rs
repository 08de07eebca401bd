mod commands;
mod config;
mod error;
mod scene;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use uffsi_core::Frequency;

use crate::commands::Context;
use crate::config::RunConfig;
use crate::error::CliError;

/// Foveated Fourier single-pixel imaging simulator.
#[derive(Debug, Parser)]
#[command(name = "uffsi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a cell layout and write layout.bin, cellmap.pgm and summary.txt.
    Layout(Common),
    /// Render weighted Fourier patterns as PGM files.
    Patterns {
        #[command(flatten)]
        common: Common,
        /// Frequency to render as `ku,kv`; repeatable. Overrides the config.
        #[arg(long = "k", value_parser = parse_frequency)]
        freqs: Vec<Frequency>,
    },
    /// Acquire and reconstruct one scene.
    Simulate(SceneArgs),
    /// Compare foveated and uniform FSI at matched budgets.
    Compare(SceneArgs),
    /// Write the synthetic test chart.
    Chart(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run seed; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Args)]
struct SceneArgs {
    #[command(flatten)]
    common: Common,
    /// Scene image (PGM or PNG). Without it the test chart is used.
    #[arg(long)]
    scene: Option<PathBuf>,
}

fn parse_frequency(s: &str) -> Result<Frequency, String> {
    let (u, v) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `ku,kv`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("`{t}`: {e}"));
    Ok(Frequency::new(parse(u)?, parse(v)?))
}

fn context(common: &Common) -> Result<Context, CliError> {
    if common.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(common.threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let config = RunConfig::load(&common.config, common.seed)?;
    Ok(Context::new(config, common.out.clone()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Layout(c) => commands::layout(&context(c)?),
        Command::Patterns { common, freqs } => commands::patterns(&context(common)?, freqs),
        Command::Simulate(a) => commands::simulate(&context(&a.common)?, a.scene.as_deref()),
        Command::Compare(a) => commands::compare(&context(&a.common)?, a.scene.as_deref()),
        Command::Chart(c) => commands::chart(&context(c)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
