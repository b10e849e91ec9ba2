//! `seamcut` command-line front end.
//!
//! Three subcommands: `stitch` runs the full pipeline on a pair of
//! images, `evaluate` re-scores a stored labeling without re-cutting,
//! and `fixture` renders a synthetic test pair.

mod job;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use seamcut::{Smoothing, StitchError};

#[derive(Parser)]
#[command(name = "seamcut", version, about = "Seam-driven two-image stitcher")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stitch a reference/target pair into a composite.
    Stitch(StitchArgs),
    /// Score a stored labeling against a pair without re-cutting.
    Evaluate(EvaluateArgs),
    /// Render a synthetic fixture pair with oracle masks.
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct ConfigOverrides {
    /// JSON config file mirroring the StitchConfig field names.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    patch_size: Option<u32>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    band_radius: Option<u32>,
    #[arg(long)]
    max_iter: Option<u32>,
    /// Signal smoothing: wavelet, movavg or none.
    #[arg(long)]
    smoothing: Option<Smoothing>,
    #[arg(long)]
    poisson_tolerance: Option<f64>,
    /// Reweight the pristine difference map each iteration instead of
    /// compounding onto the previous iteration's map.
    #[arg(long)]
    no_compounding: bool,
}

#[derive(Args)]
struct StitchArgs {
    /// Reference image (PNG or JPEG).
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Target image (PNG or JPEG).
    #[arg(long)]
    target: PathBuf,
    /// Optional 3x3 homography mapping target pixels onto the reference
    /// frame: JSON array or whitespace-separated text, row-major.
    #[arg(long)]
    homography: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated outputs: composite, naive, seam-overlay,
    /// signals-csv, report-json, labeling, iter-overlays, all.
    #[arg(long, default_value = "composite,report-json,labeling")]
    emit: String,
    #[command(flatten)]
    overrides: ConfigOverrides,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    homography: Option<PathBuf>,
    /// Labeling image written by `stitch` (0/255 over the overlap bbox).
    #[arg(long)]
    labeling: PathBuf,
    /// JSON sidecar of the labeling; defaults to the labeling path with
    /// a .json extension.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    overrides: ConfigOverrides,
}

#[derive(Args)]
struct FixtureArgs {
    /// Fixture spec JSON; omit for the default spec.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

/// Distinct exit code per error class (clap owns 1 and 2).
fn exit_code(err: &StitchError) -> u8 {
    match err {
        StitchError::Io { .. } => 10,
        StitchError::Decode { .. } => 11,
        StitchError::Format(_) => 12,
        StitchError::DimensionMismatch(_) => 13,
        StitchError::EmptyOverlap => 14,
        StitchError::SingularHomography { .. } => 15,
        StitchError::ConstraintConflict { .. } => 16,
        StitchError::EmptySeam => 17,
        StitchError::LengthMismatch { .. } => 18,
        StitchError::SolverDivergence { .. } => 19,
        StitchError::InvalidSpec(_) => 20,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Stitch(args) => job::run_stitch(args),
        Command::Evaluate(args) => job::run_evaluate(args),
        Command::Fixture(args) => job::run_fixture(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("seamcut: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
