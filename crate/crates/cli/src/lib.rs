//! Command-line front end: expression parser, evaluator and verbs.

pub mod commands;
pub mod config;
pub mod eval;
pub mod parse;

use clap::Parser;
use thiserror::Error;

pub use commands::{Cli, Command, Settings};
pub use parse::{parse, Expr, ParseError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Lib(#[from] fermat_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Lib(_) => 1,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Lib(e) => e.code(),
        }
    }
}

/// What a run prints and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Runs the program on `args` (including the program name).
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> Outcome {
    let result = Settings::resolve(cli).and_then(|s| commands::dispatch(&cli.command, &s).map(|out| (out, s)));
    match result {
        Ok((out, _)) => Outcome { stdout: format!("{out}\n"), stderr: String::new(), code: 0 },
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error[{}]: {e}\n", e.code()), code: e.exit_code() },
    }
}
