use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gauge_noether_cli::config::{Overrides, RunConfig};
use gauge_noether_cli::{run, Command, Outcome, EXIT_USAGE};

#[derive(Parser)]
#[command(
    name = "gauge-noether",
    version,
    about = "Covariant Hamiltonian lattice gauge engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evolve initial data and write per-step diagnostics as CSV.
    Simulate(Flags),
    /// Form-invariance refinement study over random gauge functions.
    CheckInvariance(Flags),
    /// Current divergence, Gauss and Maxwell residuals at two resolutions.
    CheckNoether(Flags),
    /// Compare the matrix and scalar integrators at N = 1.
    ReduceU1(Flags),
    /// Free-field frequency against the discrete and continuum dispersion relations.
    Dispersion(Flags),
}

#[derive(Args)]
struct Flags {
    /// TOML run configuration; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Refinement factor between the two resolutions of a study.
    #[arg(long)]
    refine: Option<usize>,
    /// Only check algebraic identities on off-shell states.
    #[arg(long)]
    algebraic_only: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let (command, flags) = match cli.command {
        Cmd::Simulate(f) => (Command::Simulate, f),
        Cmd::CheckInvariance(f) => (Command::CheckInvariance, f),
        Cmd::CheckNoether(f) => (Command::CheckNoether, f),
        Cmd::ReduceU1(f) => (Command::ReduceU1, f),
        Cmd::Dispersion(f) => (Command::Dispersion, f),
    };
    let mut cfg = match &flags.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_USAGE as u8);
            }
        },
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        seed: flags.seed,
        out: flags.out,
        refine: flags.refine,
        algebraic_only: flags.algebraic_only,
    });
    let outcome = run(command, &cfg);
    match &outcome {
        Outcome::Done(report) => {
            for line in &report.lines {
                println!("{line}");
            }
        }
        Outcome::Usage(msg) => eprintln!("error: {msg}"),
        Outcome::Numerical(msg) => eprintln!("numerical failure: {msg}"),
    }
    ExitCode::from(outcome.exit_code() as u8)
}
