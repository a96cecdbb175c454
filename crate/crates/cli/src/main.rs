use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use sdoflab_cli::{parse_args, run, CliError, Sinks, EXIT_INVALID};

fn main() -> ExitCode {
    let config = match parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                // clap would exit with 2, which is reserved for counterexamples.
                _ => ExitCode::from(EXIT_INVALID),
            };
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    let (mut out, mut log) = (stdout.lock(), stderr.lock());
    let result = run(&config, &mut Sinks { out: &mut out, log: &mut log });
    let _ = out.flush();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let hint = match &e {
                CliError::Core(_) => "check the regime and input files",
                CliError::Usage(_) => "see `sdoflab <command> --help`",
                CliError::Io { .. } => "check the path and permissions",
            };
            let _ = writeln!(log, "error: {e}\nhint: {hint}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
