use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod io;

use args::Cli;

/// Exit status for malformed invocations and invalid configuration.
const EXIT_USAGE: u8 = 1;
/// Exit status for unreadable, inconsistent or malformed data.
const EXIT_DATA: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    init_logging(cli.verbose, cli.quiet);

    let config = match cli.resolve_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    log::debug!("config: {config:?}");

    match commands::run(&cli.command, &config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ punforge_core::Error::InvalidArgument(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DATA)
        }
    }
}

fn init_logging(verbose: u8, quiet: bool) {
    let level = match (quiet, verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        (false, 2) => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_env("PUNGEN_LOG")
        .format_timestamp(None)
        .init();
}
