use std::process::ExitCode;

use clap::Parser;
use cyclecert::harness::cli::{Cli, EXIT_ASSERT, EXIT_INVALID, EXIT_OK, EXIT_RUNTIME};
use cyclecert::harness::{all_satisfied, emit, run, Experiment};
use cyclecert::Error;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = cli.config();
    if let Err(e) = config.validate() {
        eprintln!("cyclecert: invalid configuration: {e}");
        return ExitCode::from(EXIT_INVALID as u8);
    }
    let records = match run(&config) {
        Ok(r) => r,
        Err(e @ (Error::InvalidInput(_) | Error::Parse { .. })) => {
            eprintln!("cyclecert: invalid configuration: {e}");
            return ExitCode::from(EXIT_INVALID as u8);
        }
        Err(e) => {
            eprintln!("cyclecert: {e}");
            return ExitCode::from(EXIT_RUNTIME as u8);
        }
    };
    if let Err(e) = emit(&config, &records, cli.out.as_deref()) {
        eprintln!("cyclecert: cannot write output: {e}");
        return ExitCode::from(EXIT_RUNTIME as u8);
    }
    if config.experiment == Experiment::GfCheck {
        let ok = all_satisfied(&records);
        eprintln!("all coefficients = 1: {}", if ok { "PASS" } else { "FAIL" });
    }
    if cli.check && !all_satisfied(&records) {
        eprintln!("cyclecert: at least one check failed");
        return ExitCode::from(EXIT_ASSERT as u8);
    }
    ExitCode::from(EXIT_OK as u8)
}
