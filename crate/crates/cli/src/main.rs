//! Experiment harness for the graphsig library: dataset generation,
//! denoising and classification grids, bias/variance tables, and
//! hyperparameter sweeps, all as CSV/JSON artifacts under one manifest.

mod args;
mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use args::{BiasVarianceArgs, ClassifyArgs, DenoiseArgs, GenSbmArgs, SweepArgs};
use commands::CellFailure;

#[derive(Debug, Parser)]
#[command(name = "graphsig", version, about = "Graph signal denoising experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Add feature noise and measure how much a kernel removes.
    Denoise(DenoiseArgs),
    /// Train node classifiers over a noise grid and tabulate accuracy.
    Classify(ClassifyArgs),
    /// Monte-Carlo bias/variance tables for the polynomial denoiser.
    BiasVariance(BiasVarianceArgs),
    /// Test accuracy as a function of alpha or K.
    Sweep(SweepArgs),
    /// Generate and save planted-community datasets.
    GenSbm(GenSbmArgs),
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let (name, outcome) = match &cli.command {
        Command::Denoise(a) => ("denoise", commands::cmd_denoise(a)),
        Command::Classify(a) => ("classify", commands::cmd_classify(a)),
        Command::BiasVariance(a) => ("bias-variance", commands::cmd_bias_variance(a)),
        Command::Sweep(a) => ("sweep", commands::cmd_sweep(a)),
        Command::GenSbm(a) => ("gen-sbm", commands::cmd_gen_sbm(a)),
    };
    match outcome {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            report_errors(name, &failures);
            ExitCode::from(1)
        }
        Err(e) => {
            report_errors(
                name,
                &[CellFailure {
                    cell: "setup".into(),
                    error: e.to_string(),
                }],
            );
            ExitCode::from(2)
        }
    }
}

/// Machine-readable error summary on stderr, one JSON object per run.
fn report_errors(command: &str, failures: &[CellFailure]) {
    let summary = serde_json::json!({
        "status": "error",
        "command": command,
        "errors": failures,
    });
    eprintln!("{summary}");
}
