//! Command-line front end: one subcommand per pipeline stage plus `grid`.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 stage failure.
//! `KG_TYPER_THREADS` caps the worker pool.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kg_typer::pipeline::{self, ExperimentConfig, PipelineError, RunOptions, Stage};

#[derive(Parser)]
#[command(
    name = "kg-typer",
    version,
    about = "Infer RDF types from random-walk features"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Re-run even if the stage's artifacts exist.
    #[arg(long)]
    force: bool,
    /// Abort on the first malformed N-Triples line.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse N-Triples into a graph snapshot and type list.
    Ingest(Common),
    /// Join types, filter labels, split into partitions.
    Prep(Common),
    /// Extract random-walk features.
    Walk(Common),
    /// Build the feature vocabulary and encode every partition.
    Encode(Common),
    /// Train the network.
    Train(Common),
    /// Score the test partition and write the report.
    Eval(Common),
    /// Run the `[grid]` axes of the config.
    Grid(Common),
}

enum Failure {
    Config(String),
    Stage(String),
}

fn threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("KG_TYPER_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        Failure::Config(format!("KG_TYPER_THREADS={v:?} is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(format!("thread pool: {e}")))
}

fn classify(e: PipelineError) -> Failure {
    if e.is_config() {
        Failure::Config(e.to_string())
    } else {
        Failure::Stage(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    threads()?;
    let (stage, common) = match cli.command {
        Command::Ingest(c) => (Some(Stage::Ingest), c),
        Command::Prep(c) => (Some(Stage::Prep), c),
        Command::Walk(c) => (Some(Stage::Walk), c),
        Command::Encode(c) => (Some(Stage::Encode), c),
        Command::Train(c) => (Some(Stage::Train), c),
        Command::Eval(c) => (Some(Stage::Eval), c),
        Command::Grid(c) => (None, c),
    };
    let mut cfg =
        ExperimentConfig::load(&common.config).map_err(|e| Failure::Config(e.to_string()))?;
    if common.strict {
        cfg = cfg
            .with_overrides(&[("input.strict".into(), "true".into())])
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let opts = RunOptions {
        force: common.force,
    };
    match stage {
        Some(stage) => {
            let out = pipeline::run_stage(stage, &cfg, opts).map_err(classify)?;
            if out.skipped {
                eprintln!("{stage}: up to date ({})", out.dir.display());
            } else {
                eprintln!("{stage}: {} ({})", out.summary, out.dir.display());
            }
            if stage == Stage::Eval {
                let report = out.dir.join("report.txt");
                let text = std::fs::read_to_string(&report)
                    .map_err(|e| Failure::Stage(format!("{}: {e}", report.display())))?;
                print!(
                    "{}",
                    text.lines().skip(1).collect::<Vec<_>>().join("\n") + "\n"
                );
            }
        }
        None => {
            let report = pipeline::run_grid(&cfg, &cfg.axes, opts).map_err(classify)?;
            print!("{}", report.render());
            eprintln!(
                "grid: {} cells, {} failed ({})",
                report.cells.len(),
                report.failures(),
                report.path.display()
            );
            if report.failures() > 0 {
                return Err(Failure::Stage(format!(
                    "{} grid cells failed",
                    report.failures()
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("kg-typer: config error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Stage(msg)) => {
            eprintln!("kg-typer: {msg}");
            ExitCode::from(2)
        }
    }
}
