//! Command-line front end: each subcommand maps to one pipeline stage
//! (plus `all`, `compare`, and the `plot` helper), errors go to stderr,
//! and the exit code states the failure class (2 parse, 3 validation,
//! 4 missing dependency, 5 I/O, 1 internal).

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use fmcw_doa_lab::io;
use fmcw_doa_lab::pipeline::{self, PipelineError, RunOptions, Stage};
use fmcw_doa_lab::specproc::Window;

/// FMCW radar playground: simulate multi-channel chirp returns, form
/// range-Doppler maps, detect targets, and estimate their angles.
#[derive(Parser)]
#[command(name = "fmcw-doa-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the raw data cube (cube.bin).
    Simulate(RunArgs),
    /// Form one range-Doppler map per CPI (CSV and PGM).
    Rdmap(RunArgs),
    /// Run the CFAR detector over every map (detections.csv).
    Detect(RunArgs),
    /// Beamform the CPI-0 detections with a zero-padded FFT.
    DoaFft(RunArgs),
    /// Estimate CPI-0 detection angles with MUSIC.
    DoaMusic(RunArgs),
    /// Estimate CPI-0 detection angles by sparse reconstruction.
    DoaCs(RunArgs),
    /// Evaluate MUSIC at every range bin of CPI 0 (CSV and PGM).
    RangeAngle(RunArgs),
    /// Run every stage in dependency order.
    All(RunArgs),
    /// Time all three angle estimators on identical inputs.
    Compare(RunArgs),
    /// Render an angle-spectrum CSV as an SVG line plot.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory, created if needed.
    #[arg(long)]
    out: PathBuf,
    /// Scenario override, KEY=VALUE with a dot path (e.g.
    /// targets.0.range_m=42). Repeatable, applied in order.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Noise seed, overriding the scenario's rng_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Merge touching detections into one per target blob.
    #[arg(long)]
    cluster: bool,
    /// Processing taper on both transform axes.
    #[arg(long, default_value = "hann")]
    window: Window,
}

impl RunArgs {
    fn options(self) -> RunOptions {
        RunOptions {
            scenario_path: self.scenario,
            out_dir: self.out,
            overrides: self.set,
            seed: self.seed,
            cluster: self.cluster,
            window: self.window,
        }
    }
}

#[derive(Args)]
struct PlotArgs {
    /// Angle-spectrum CSV written by a doa-* stage.
    #[arg(long)]
    input: PathBuf,
    /// SVG file to write.
    #[arg(long)]
    out: PathBuf,
}

fn run_stages(stages: &[Stage], args: RunArgs) -> Result<(), PipelineError> {
    let manifest = pipeline::run(stages, &args.options())?;
    for stage in &manifest.stages {
        println!(
            "{}: {:.3} s, wrote {}",
            stage.stage,
            stage.seconds,
            stage.outputs.join(", ")
        );
    }
    Ok(())
}

fn compare(args: RunArgs) -> Result<(), PipelineError> {
    let report = pipeline::compare_methods(&args.options())?;
    for row in &report.rows {
        let peaks: Vec<String> = row.peak_angles_deg.iter().map(|a| format!("{a:.2}")).collect();
        println!(
            "{}: {:.6} s, peaks [{}] deg, resolved {}",
            row.method,
            row.seconds,
            peaks.join(", "),
            row.resolved
        );
    }
    Ok(())
}

fn plot(args: PlotArgs) -> Result<(), PipelineError> {
    let (method, rows) = io::read_angle_spectrum_csv(&args.input)?;
    io::write_angle_spectrum_svg(&args.out, &method, &rows)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => run_stages(&[Stage::Simulate], args),
        Command::Rdmap(args) => run_stages(&[Stage::RdMap], args),
        Command::Detect(args) => run_stages(&[Stage::Detect], args),
        Command::DoaFft(args) => run_stages(&[Stage::DoaFft], args),
        Command::DoaMusic(args) => run_stages(&[Stage::DoaMusic], args),
        Command::DoaCs(args) => run_stages(&[Stage::DoaCs], args),
        Command::RangeAngle(args) => run_stages(&[Stage::RangeAngle], args),
        Command::All(args) => run_stages(&Stage::ALL, args),
        Command::Compare(args) => compare(args),
        Command::Plot(args) => plot(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
