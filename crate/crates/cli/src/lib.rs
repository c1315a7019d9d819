//! Command-line front end: simulations, criteria, the horizon comparison,
//! embedding-constant calibration and trajectory monitoring.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod fields;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::Outcome;
use crate::config::{BoundsSettings, CalibrateSettings, CompareSettings, FileConfig, MonitorSettings, SimSettings};
use crate::error::{CliError, EXIT_USAGE};
use crate::output::OutputDir;

fn dispatch(cli: &Cli) -> Result<(&'static str, Outcome, Option<OutputDir>), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let out_path = cli.out.clone().or_else(|| file.out.clone());
    // resolve before touching the filesystem so that bad input leaves no trace
    enum Resolved {
        Simulate(SimSettings),
        Bounds(BoundsSettings),
        Compare(CompareSettings),
        Calibrate(CalibrateSettings),
        Monitor(MonitorSettings),
    }
    let resolved = match &cli.command {
        Command::Simulate(a) => Resolved::Simulate(SimSettings::resolve(a, &file)?),
        Command::Bounds(a) => Resolved::Bounds(BoundsSettings::resolve(a, &file)?),
        Command::Compare(a) => Resolved::Compare(CompareSettings::resolve(a, &file)?),
        Command::Calibrate(a) => Resolved::Calibrate(CalibrateSettings::resolve(a, &file)?),
        Command::Monitor(a) => Resolved::Monitor(MonitorSettings::resolve(a, &file)?),
    };
    let out = out_path.as_deref().map(OutputDir::create).transpose()?;
    let o = out.as_ref();
    let (name, outcome) = match &resolved {
        Resolved::Simulate(s) => ("simulate", commands::cmd_simulate(s, o)?),
        Resolved::Bounds(s) => ("bounds", commands::cmd_bounds(s, o)?),
        Resolved::Compare(s) => ("compare", commands::cmd_compare(s, o)?),
        Resolved::Calibrate(s) => ("calibrate", commands::cmd_calibrate(s, o)?),
        Resolved::Monitor(s) => ("monitor", commands::cmd_monitor(s, o)?),
    };
    Ok((name, outcome, out))
}

/// Parse `args`, run the subcommand and return the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(&cli) {
        Ok((name, outcome, out)) => {
            for w in &outcome.warnings {
                let _ = writeln!(stderr, "{w}");
            }
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            if let Some(dir) = out {
                if let Err(e) = dir.finish(name, outcome.exit_code, outcome.summary.clone()) {
                    let _ = writeln!(stderr, "error: {e}");
                    return e.exit_code();
                }
            }
            outcome.exit_code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
