//! `grover4d`: run either engine, or any of the analyses built on them, and
//! emit CSV or JSON.
//!
//! Exit status is 0 on success, 1 on a parse or validation failure and 2 when
//! `compare --check` finds the engines disagreeing.

mod args;
mod commands;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use grover4d::Exec;

use crate::args::Cli;
use crate::error::CliError;

fn write_output(text: &str, path: Option<&std::path::Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    let outcome = commands::run(&cli.command, exec)
        .and_then(|o| write_output(&o.text, o.output.as_deref()).map(|_| o));
    match outcome {
        Ok(o) => match o.check_failure {
            Some(msg) => {
                eprintln!("error: CheckFailed: {msg}");
                ExitCode::from(2)
            }
            None => ExitCode::SUCCESS,
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
