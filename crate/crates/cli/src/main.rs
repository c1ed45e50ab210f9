#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod error;
mod output;
mod spec;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(a) => commands::run::run(a),
        Command::Verify(a) => commands::verify::verify(a),
        Command::Curvature(a) => commands::curvature::curvature(a),
        Command::Sweep(a) => commands::sweep::sweep(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("s3flow: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
