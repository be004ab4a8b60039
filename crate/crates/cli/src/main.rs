use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ctstd_cli::{
    run_analyze, run_phantom, run_stage, CommonArgs, PhantomArgs, RunConfig, RunSummary, Stage,
};

#[derive(Parser)]
#[command(
    name = "ctstd",
    version,
    about = "Spatial and slice standardization of CT volumes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Crop every slice of each scan to the union lung bounding box.
    Crop(CommonArgs),
    /// Keep a fixed number of slices per scan.
    Sample(CommonArgs),
    /// Crop, then sample.
    Pipeline(CommonArgs),
    /// Embedding separation and source-consistency metrics from a CSV.
    Analyze(CommonArgs),
    /// Render synthetic lung volumes with ground truth.
    Phantom(PhantomArgs),
}

fn report(summary: &RunSummary) -> ExitCode {
    eprintln!(
        "{}: {} scans, {} failed",
        summary.command, summary.n_scans, summary.n_failed
    );
    for f in summary.failures() {
        eprintln!("  FAILED {}: {}", f.path, f.error.as_deref().unwrap_or(""));
    }
    if summary.n_failed > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let (stage, args) = match cli.command {
        Command::Crop(a) => (Stage::Crop, a),
        Command::Sample(a) => (Stage::Sample, a),
        Command::Pipeline(a) => (Stage::Pipeline, a),
        Command::Analyze(a) => {
            let cfg = RunConfig::resolve("analyze", &a)?;
            let r = run_analyze(cfg.require_input()?, cfg.output.as_deref())?;
            print!("{}", r.table());
            return Ok(ExitCode::SUCCESS);
        }
        Command::Phantom(a) => {
            let written = run_phantom(&a)?;
            eprintln!(
                "phantom: wrote {} volumes to {}",
                written.len(),
                a.output.display()
            );
            return Ok(ExitCode::SUCCESS);
        }
    };
    let cfg = RunConfig::resolve(stage.name(), &args)?;
    Ok(report(&run_stage(stage, &cfg)?))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
