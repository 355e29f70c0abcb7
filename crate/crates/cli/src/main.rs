//! `extropy` command-line tool.
//!
//! Exit status: 0 on success, 2 for invalid input, 3 for a numerical
//! failure, 4 when `--strict` is set and a claim is violated. Failures
//! print a JSON error document on stdout.

mod args;
mod commands;
mod output;

use std::fs;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Command, Format};
use commands::Failure;

fn error_document(kind: &str, message: &str) -> String {
    let doc = json!({ "error": { "kind": kind, "message": message } });
    serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n"
}

fn run(cli: &Cli) -> Result<(output::Table, bool), Failure> {
    let opts = commands::options(&cli.common)?;
    let table = match &cli.command {
        Command::Measure(a) => commands::measure_cmd(a, &opts)?,
        Command::Curve(a) => commands::curve_cmd(a, &opts)?,
        Command::Bivariate(a) => commands::bivariate_cmd(a, &opts)?,
        Command::Transform(a) => commands::transform_cmd(a, &opts)?,
        Command::Claims(a) => commands::claims_cmd(a, &opts)?,
        Command::Mc(a) => commands::mc_cmd(a, &opts, cli.common.seed)?,
    };
    let violated = matches!(cli.command, Command::Claims(_)) && commands::violations(&table) > 0;
    Ok((table, violated))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            print!("{}", error_document("usage", e.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok((table, violated)) => {
            let text = match cli.common.format {
                Format::Json => table.to_json(),
                Format::Csv => table.to_csv(),
            };
            match &cli.common.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, text) {
                        let msg = format!("cannot write '{}': {e}", path.display());
                        eprintln!("{msg}");
                        print!("{}", error_document("validation", &msg));
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if violated && cli.common.strict {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            print!("{}", error_document(f.kind(), f.message()));
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
