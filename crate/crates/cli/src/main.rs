mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Ctx;

#[derive(Parser)]
#[command(
    name = "monopsono",
    version,
    about = "Labor-market concentration, commuting zones, and minimum-wage analysis pipeline"
)]
struct Cli {
    /// INI-style configuration file with one section per subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for artifacts and run manifests.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Master random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Industry digits for market definitions.
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(3..=5))]
    digits: Option<u8>,

    /// Market object: employment or hires.
    #[arg(long, global = true)]
    object: Option<String>,

    /// Specification preset name or [spec.NAME] config section.
    #[arg(long, global = true)]
    spec: Option<String>,

    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic snapshot panel with planted ground truth.
    Synth,
    /// Aggregate snapshots into market and establishment panels.
    Ingest,
    /// Merge districts into commuting zones by dominant flows.
    Delineate,
    /// Compute concentration indices per market-year.
    Concentration,
    /// Build the leave-one-out concentration instrument.
    Instrument,
    /// Estimate a regression specification.
    Regress,
    /// Evaluate minimum-wage elasticities over an HHI grid.
    Elasticity {
        /// Comma-separated HHI grid (overrides the config).
        #[arg(long)]
        grid: Option<String>,
    },
    /// Plausibly-exogenous bounds for the instrumented effect.
    Bounds,
    /// Oligopsony minimum-wage response curves.
    Simulate,
    /// Summarize previously produced artifacts.
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    let ctx = match Ctx::new(
        cli.config.as_deref(),
        &cli.out,
        cli.seed,
        cli.digits,
        cli.object.as_deref(),
        cli.spec.as_deref(),
    ) {
        Ok(ctx) => ctx,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            return ExitCode::from(1);
        }
    };

    let result = match &cli.command {
        Command::Synth => commands::synth::run(&ctx),
        Command::Ingest => commands::ingest::run(&ctx),
        Command::Delineate => commands::delineate::run(&ctx),
        Command::Concentration => commands::concentration::run(&ctx),
        Command::Instrument => commands::instrument::run(&ctx),
        Command::Regress => commands::regress::run(&ctx),
        Command::Elasticity { grid } => commands::elasticity::run(&ctx, grid.as_deref()),
        Command::Bounds => commands::bounds::run(&ctx),
        Command::Simulate => commands::simulate::run(&ctx),
        Command::Report => commands::report::run(&ctx),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            ExitCode::from(1)
        }
    }
}
