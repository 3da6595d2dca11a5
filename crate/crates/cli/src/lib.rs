//! Command-line front end for `dualfb-core`: PGM and CSV I/O, TOML run
//! configurations, convergence traces and oracle self-checks.
//!
//! Exit codes: 0 when a solver met its tolerance (or a check passed), 2 when
//! it stopped at the iteration cap, 1 on any input, configuration or
//! numerical error. Errors go to stderr prefixed with `error:`.

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub mod cli;
pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod notation;
pub mod pgm;
pub mod trace;
pub mod verify;

use cli::{Cli, Command};
use commands::{Ctx, EXIT_INPUT, EXIT_OK};
pub use error::{CliError, CliResult};

pub fn dispatch(cli: &Cli) -> CliResult<i32> {
    let file = match &cli.config {
        Some(p) => config::load_config(p)?,
        None => config::RunConfig::default(),
    };
    let ctx = Ctx {
        quiet: cli.quiet,
        verbose: cli.verbose,
    };
    match &cli.command {
        Command::Tv(a) => commands::tv(ctx, a, &file),
        Command::Dict(a) => commands::dict(ctx, a, &file),
        Command::Bestapprox(a) => commands::bestapprox(ctx, a, &file),
        Command::Softapprox(a) => commands::softapprox(ctx, a, &file),
        Command::PotterArun(a) => commands::potter_arun(ctx, a, &file),
        Command::ProxEval(a) => commands::prox_eval(ctx, a),
        Command::Verify(a) => commands::verify(ctx, a, &file),
    }
}

/// Parses `args` (including the program name), runs, and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return EXIT_OK;
        }
        Err(e) => {
            // clap already prefixes its messages with "error:"
            eprint!("{}", e.render());
            return EXIT_INPUT;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
