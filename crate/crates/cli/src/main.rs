use std::process::ExitCode;

use clap::Parser;
use mpcore_cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match mpcore_cli::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("mpcore: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
