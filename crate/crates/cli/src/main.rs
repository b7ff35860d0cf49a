//! `geolab`: batch front end for geodesic-lab.
//!
//! Exit status: 0 success, 1 runtime failure, 2 invalid configuration,
//! 3 finished but the length spectrum is only best-effort.

// `!(a > b)` is used deliberately so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ConfigArgs;

#[derive(Parser)]
#[command(name = "geolab", version, about = "Prime geodesic experiments on hyperbolic surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate (or reuse a cached) primitive length spectrum
    Spectrum,
    /// Ingest eigenvalues or synthesize zeros; export them with a Weyl-law check
    Zeros,
    /// Tabulate psi, psi1, psi2 on a grid
    Psi,
    /// Fit the explicit formulas and compare the h = x^(3/4) sandwich with psi
    Compare,
    /// Scan the exceptional sets E, F, G, H octave by octave
    Scan,
    /// Reconstruct psi with h = x^(3/4)/(log x)^alpha away from exceptional points
    Thm2,
}

pub enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    pub fn runtime(m: impl Into<String>) -> Self {
        Failure::Runtime(m.into())
    }
}

impl From<geodesic_lab::Error> for Failure {
    fn from(e: geodesic_lab::Error) -> Self {
        match e {
            geodesic_lab::Error::InvalidParameter(m) => Failure::Config(m),
            e => Failure::Runtime(e.to_string()),
        }
    }
}

/// Normal completion; `incomplete` asks for the warning exit status.
pub struct Outcome {
    pub incomplete: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.config.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("geolab: configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Zeros => commands::zeros(&cfg),
        Command::Psi => commands::psi(&cfg),
        Command::Compare => commands::compare(&cfg),
        Command::Scan => commands::scan(&cfg),
        Command::Thm2 => commands::thm2(&cfg),
    };
    match result {
        Ok(Outcome { incomplete: false }) => ExitCode::SUCCESS,
        Ok(Outcome { incomplete: true }) => {
            eprintln!("geolab: warning: length spectrum is best-effort (enumeration cap reached)");
            ExitCode::from(3)
        }
        Err(Failure::Config(m)) => {
            eprintln!("geolab: configuration error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("geolab: error: {m}");
            ExitCode::from(1)
        }
    }
}
