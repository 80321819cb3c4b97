use std::process::ExitCode;

use clap::Parser;
use evfilt_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match evfilt_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(evfilt_cli::exit_code(&err))
        }
    }
}
