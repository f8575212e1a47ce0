use std::process::ExitCode;

use clap::error::ErrorKind;
use zerorate::cli;

fn main() -> ExitCode {
    let parsed = match cli::parse(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match cli::execute(&parsed).and_then(|r| cli::emit(&parsed, &r)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zerorate: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
