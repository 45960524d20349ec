mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use hodge_gp::Error;

use args::{Cli, Command};

/// Exit code for a library error.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Usage(_) | Error::Generation(_) => 1,
        Error::Structural(_)
        | Error::Ingestion { .. }
        | Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_) => 2,
        Error::Numerical(_) | Error::Classification { .. } => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HODGE_GP_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => commands::generate::run(a),
        Command::Decompose(a) => commands::decompose::run(a),
        Command::Spectrum(a) => commands::spectrum::run(a),
        Command::FitPredict(a) => commands::fit_predict::run(a),
        Command::Sample(a) => commands::sample::run(a),
        Command::Diffuse(a) => commands::diffuse::run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
