//! Command-line front end: image I/O, output formats and the `snakelet`
//! subcommands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod io;

use std::ffi::OsString;

use clap::Parser;

use cli::{Cli, Command};
pub use error::CliError;

/// Parses `args` (program name first), merges the config file and runs the
/// chosen command.
pub fn run(args: Vec<OsString>) -> Result<(), CliError> {
    let args = config::expand_args(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return Ok(());
        }
        Err(e) => {
            let text = e.render().to_string();
            return Err(CliError::Usage(text.trim_start_matches("error: ").to_string()));
        }
    };
    match &cli.command {
        Command::Canny(a) => commands::canny(a),
        Command::Recover(a) => commands::recover_cmd(a),
        Command::Detect(a) => commands::detect_cmd(a),
        Command::Eval(a) => commands::eval_cmd(a),
        Command::Gvf(a) => commands::gvf_cmd(a),
    }
}
