mod args;
mod commands;
mod failure;
mod workspace;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version output is not an error.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let outcome = match &cli.command {
        Command::Prepare(a) => commands::prepare::run(a),
        Command::Gridsearch(a) => commands::gridsearch::run(a),
        Command::Run(a) => commands::run::run(a),
        Command::Evaluate(a) => commands::evaluate::run(a),
        Command::Importance(a) => commands::importance::run(a),
        Command::Memory(a) => commands::memory::run(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
