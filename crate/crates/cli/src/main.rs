mod args;
mod commands;
mod config;
mod grid;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::commands::{exit_code, run, CliError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv = match config::expand_config_file(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(commands::EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Core(fresh_core::Error::Diverged { .. }) = &e {
                eprintln!("hint: lower --lr or the embedding frequency");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
