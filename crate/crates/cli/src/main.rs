mod cli;
mod commands;
mod eval;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};

/// Bad flags or arguments that clap cannot catch on its own.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// 2 for usage and input problems, 3 for pipeline failures.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<repcount::Error>() {
            return if e.is_input_error() { 2 } else { 3 };
        }
    }
    3
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|c| c.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Count(args) => commands::count(args),
        Command::Stream(args) => commands::stream(args),
        Command::Eval(args) => eval::eval(args),
        Command::Synth(args) => commands::synth(args),
        Command::Bench(args) => commands::bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("repcount: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
