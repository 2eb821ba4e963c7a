mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "engelsteer", version, about = "Horizontal curves in the Engel group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lift planar controls to a horizontal curve.
    Lift(RunConfig),
    /// Solve a boundary-value problem with the polynomial steering family.
    Steer(RunConfig),
    /// Extend a curve fragment to a C¹ horizontal curve.
    Extend(RunConfig),
    /// Approximate a horizontal curve by a C¹ one agreeing off a small set.
    Lusin(RunConfig),
    /// Report horizontality of a curve CSV or the Whitney table of a fragment.
    Check(RunConfig),
    /// Sample the X2 direction for reversals of the fourth coordinate.
    Probe(RunConfig),
}

#[derive(clap::Args, Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Input file: JSON, or CSV for curves.
    #[arg(long)]
    pub input: PathBuf,
    /// Output path. Curves go here as CSV; diagnostics go next to it with a `.json` extension.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Number of output samples.
    #[arg(long, default_value_t = 1001)]
    pub grid: usize,
    #[arg(long, env = "ENGELSTEER_SEED", default_value_t = 42)]
    pub seed: u64,
    /// |u1| below this counts as a vertical direction.
    #[arg(long, default_value_t = 1e-9)]
    pub tau_dir: f64,
    /// Measure the Lusin approximation may give up.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Lift(c) => commands::lift(&c),
        Command::Steer(c) => commands::steer(&c),
        Command::Extend(c) => commands::extend(&c),
        Command::Lusin(c) => commands::lusin(&c),
        Command::Check(c) => commands::check(&c),
        Command::Probe(c) => commands::probe(&c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
