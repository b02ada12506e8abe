//! `snakefit` command-line driver: run one of the three contour models
//! on an image + initialization, generate synthetic scenes, or benchmark
//! the models against each other.

mod bench;
mod overlay;
mod run;
mod scene;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use snakefit_core::Error as CoreError;

#[derive(Parser)]
#[command(name = "snakefit", version, about = "Contour fitting toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model to an image starting from an initialization curve.
    Run(run::RunArgs),
    /// Generate a synthetic scene image plus its ground-truth curve.
    Scene(scene::SceneArgs),
    /// Time several models on the same image + initialization.
    Bench(bench::BenchArgs),
}

/// Failure modes mapped onto process exit codes: 2 bad configuration,
/// 3 I/O failure, 4 model error.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Model(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Model(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) | CliError::Model(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Io(_)
            | CoreError::Format(_)
            | CoreError::Unsupported(_)
            | CoreError::CurveFile(_) => CliError::Io(e.to_string()),
            CoreError::InvalidParam(_) => CliError::Config(e.to_string()),
            CoreError::InvalidCurve(_)
            | CoreError::Geometry(_)
            | CoreError::DegenerateRegion(_)
            | CoreError::SingularSystem(_) => CliError::Model(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run::cmd_run(&args),
        Command::Scene(args) => scene::cmd_scene(&args),
        Command::Bench(args) => bench::cmd_bench(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
