use std::process::ExitCode;

use clap::Parser;
use gainwalk_cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&config, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gainwalk: error: {e}");
            ExitCode::FAILURE
        }
    }
}
