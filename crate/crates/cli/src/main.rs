//! `ipw-eval`: run selection scenarios, deployment sweeps and self-tests.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime or data error,
//! 3 validation failure.

mod commands;
mod config;
mod svg;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use commands::Failure;
use config::{Cli, CommandParams, RunConfig};

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_CONFIG),
            };
        }
    };
    let cfg = match RunConfig::resolve(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let outcome = match &cfg.params {
        CommandParams::Scenarios(p) => commands::scenarios(&cfg, p),
        CommandParams::Calibration(p) => commands::calibration(&cfg, p),
        CommandParams::DeploySweep(p) => commands::deploy_sweep(&cfg, p),
        CommandParams::Validate { quick, fault } => commands::validate(&cfg, *quick, *fault),
    };
    match outcome {
        Ok(files) => {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
        Err(Failure::Validation(n)) => {
            eprintln!(
                "validation failed: {n} propert{}",
                if n == 1 { "y" } else { "ies" }
            );
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
