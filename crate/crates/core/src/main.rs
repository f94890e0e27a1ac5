use std::process::ExitCode;

use clap::Parser;
use qmzv::cli::{dispatch, Cli};
use qmzv::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

fn main() -> ExitCode {
    // clap exits with status 2 on parse errors and 0 for --help/--version
    let cli = Cli::parse();
    let outcome = match dispatch(&cli) {
        Ok(outcome) => outcome,
        Err(err) => {
            eprintln!("qmzv: {err}");
            return ExitCode::from(match err {
                Error::Usage(_) => EXIT_USAGE,
                _ => EXIT_DOMAIN,
            });
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("qmzv: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_DOMAIN);
            }
        }
        None => print!("{}", outcome.output),
    }
    if outcome.all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
