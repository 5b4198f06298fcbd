use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use weakval::cli::{error_object, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &outcome.output),
                None => std::io::stdout().lock().write_all(outcome.output.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("weakval: cannot write output: {e}");
                return ExitCode::FAILURE;
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(err) => {
            eprintln!("{}", error_object(&err));
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
