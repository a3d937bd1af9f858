use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use rareperm_cli::report::{json_line, ErrorRecord};
use rareperm_cli::run::exit;
use rareperm_cli::{run, Cli};

fn main() -> ExitCode {
    let output = match Cli::parse().into_request() {
        Ok(request) => run(&request),
        Err(message) => {
            let record = ErrorRecord::new("usage", message, exit::USAGE);
            eprintln!("{}", json_line(&record));
            return ExitCode::from(exit::USAGE as u8);
        }
    };
    // A closed pipe on stdout is not worth a panic.
    let _ = std::io::stdout().lock().write_all(output.stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(output.stderr.as_bytes());
    ExitCode::from(output.exit_code as u8)
}
