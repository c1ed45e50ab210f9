use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "s3flow",
    version,
    about = "Integrate and check geometric flows on cones over S³"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one flow and write the trajectory.
    Run(RunArgs),
    /// Integrate one flow and check it against oracles.
    Verify(VerifyArgs),
    /// Evaluate curvature quantities at a single point.
    Curvature(CurvatureArgs),
    /// Integrate a grid of initial data and classify each trajectory.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every command that integrates. All are optional so that a
/// config file can supply them; flags win over the file.
#[derive(Debug, Clone, Default, Args)]
pub struct FlowArgs {
    /// Flat `key = value` file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// ricci1, dirac, ricci2, nricci2, asd, flow9 or hitchin.
    #[arg(long)]
    pub flow: Option<String>,
    /// Curvature sign for `dirac`.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i32>,
    /// Initial state as `name=value,...`.
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub adaptive: bool,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub collapse_eps: Option<f64>,
    #[arg(long)]
    pub max_samples: Option<usize>,
    /// Keep integrating past a collapse where the flow allows it.
    #[arg(long)]
    pub continue_past_collapse: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub flow: FlowArgs,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub flow: FlowArgs,
    /// Comma-separated oracle names.
    #[arg(long, value_delimiter = ',', required = true)]
    pub oracle: Vec<String>,
    /// Tolerance for every selected oracle, replacing the per-oracle defaults.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Eh,
    Round,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TextFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub da1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub da2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dda1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dda2: Option<f64>,
    /// Take the jet from a known profile instead of explicit values.
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    /// Bolt radius for `--profile eh`.
    #[arg(long)]
    pub a: Option<f64>,
    /// Radius for `--profile eh`.
    #[arg(long)]
    pub r: Option<f64>,
    /// Scale and derivatives for `--profile round`.
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub df: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ddf: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TextFormat,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub flow: FlowArgs,
    /// `name=start:stop:count`, given exactly twice.
    #[arg(long, required = true)]
    pub grid: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub threads: Option<usize>,
}
