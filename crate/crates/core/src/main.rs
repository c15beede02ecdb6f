use std::process::ExitCode;

use clap::Parser;

use bosonic::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("bosonic: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
