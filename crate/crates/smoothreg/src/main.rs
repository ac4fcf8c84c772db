use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    smoothreg::cli::run(smoothreg::cli::Cli::parse())
}
