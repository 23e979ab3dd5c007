use std::process::ExitCode;

use clap::Parser;
use osaas_cli::cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("osaas: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
