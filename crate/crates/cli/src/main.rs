//! `edgechroma` command-line front end.

mod args;
mod io;
mod run;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            eprintln!("edgechroma: missing subcommand (edges, colorize, style-transfer, learn-map); try --help");
            return ExitCode::from(2);
        }
        Err(e) => {
            // First paragraph only, folded onto one line; usage hints follow a blank line.
            let rendered = e.to_string();
            let summary = rendered.split("\n\n").next().unwrap_or_default();
            let line = summary.split_whitespace().collect::<Vec<_>>().join(" ");
            eprintln!("edgechroma: {}", line.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("edgechroma: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
