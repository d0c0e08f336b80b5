//! Batch front door for the quantization library.
//!
//! One subcommand per run type; the only required argument is a JSON config.
//! Report records go to `--out` (or stdout) as line-delimited JSON; a
//! human-readable summary, including wall time, goes to stderr.
//!
//! Exit codes: 0 all checks passed, 1 a residual exceeded its tolerance,
//! 2 configuration or evaluation error.

mod commands;
mod config;
mod report;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use report::Report;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

const SCHEMA: &str = include_str!("../../../schemas/runconfig.schema.json");

#[derive(Parser)]
#[command(
    name = "torusq",
    version,
    about = "Geometric quantization of integrable systems in action-angle variables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the spectrum of a quantized Hamiltonian over a label window
    Spectrum(RunArgs),
    /// Seeded random sweep of the Dirac condition on affine observable pairs
    DiracSweep(RunArgs),
    /// Gauge-conjugation and half-form-reduction equivalence checks
    Equivalence(RunArgs),
    /// Path-ordered holonomy evolution on a truncated label box
    Holonomy(RunArgs),
    /// Print the JSON schema of the run configuration
    Schema,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run configuration
    config: PathBuf,
    /// Write report records to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the seed from the config
    #[arg(long)]
    seed: Option<u64>,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Schema => {
            print!("{SCHEMA}");
            Ok(true)
        }
        Command::Spectrum(args) => dispatch(args, commands::run_spectrum),
        Command::DiracSweep(args) => dispatch(args, commands::run_dirac_sweep),
        Command::Equivalence(args) => dispatch(args, commands::run_equivalence),
        Command::Holonomy(args) => dispatch(args, commands::run_holonomy),
    }
}

fn dispatch(
    args: RunArgs,
    command: impl FnOnce(&RunConfig, Option<u64>) -> Result<Report>,
) -> Result<bool> {
    let start = Instant::now();
    let config = RunConfig::load(&args.config)?;
    let seed = args.seed.or(config.seed);
    let mut report = command(&config, seed)?;
    report.wall_ms = start.elapsed().as_millis();

    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            report.write_records(std::io::BufWriter::new(file))?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            report.write_records(&mut lock)?;
            lock.flush()?;
        }
    }
    report.write_summary(std::io::stderr().lock())?;
    Ok(report.pass)
}
