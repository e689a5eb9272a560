//! Command-line front end: argument parsing, config files, manifests and
//! the reproduction recipes.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod repro;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{CommandFactory, FromArgMatches};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::{Cli, Command};
use crate::commands::Output;
use crate::error::{CliError, Result};
use crate::manifest::{Artifacts, RunConfig};

pub const THREADS_ENV: &str = "EVOSOFT_THREADS";

/// Caps the global worker pool at `EVOSOFT_THREADS` when set. Only the first
/// call in a process takes effect.
pub fn init_threads() {
    let Ok(v) = std::env::var(THREADS_ENV) else { return };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
                log::debug!("worker pool already initialised");
            }
        }
        _ => log::warn!("ignoring {THREADS_ENV}={v:?}: expected a positive integer"),
    }
}

fn params_of<T: Serialize>(args: &T) -> Map<String, Value> {
    match serde_json::to_value(args).expect("arguments serialize") {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn dispatch(cmd: &Command) -> Result<(Map<String, Value>, Option<PathBuf>, Output)> {
    Ok(match cmd {
        Command::Grow(a) => (params_of(a), a.common.out.clone(), commands::grow(a)?),
        Command::Degfit(a) => (params_of(a), a.common.out.clone(), commands::degfit(a)?),
        Command::Motifs(a) => (params_of(a), a.common.out.clone(), commands::motifs(a)?),
        Command::Extract(a) => (params_of(a), a.common.out.clone(), commands::extract(a)?),
        Command::Compete(a) => (params_of(a), a.common.out.clone(), commands::compete(a)?),
        Command::Lattice(a) => (params_of(a), a.common.out.clone(), commands::lattice(a)?),
        Command::Fds(a) => (params_of(a), a.common.out.clone(), commands::fds(a)?),
        Command::Dgbd(a) => (params_of(a), a.common.out.clone(), commands::dgbd(a)?),
        Command::Weibull(a) => (params_of(a), a.common.out.clone(), commands::weibull(a)?),
        Command::Complexity(a) => (params_of(a), a.common.out.clone(), commands::complexity(a)?),
        Command::Temporal(a) => (params_of(a), a.common.out.clone(), commands::temporal(a)?),
        Command::Repro(a) => {
            let name = a
                .name
                .clone()
                .or_else(|| a.experiment.clone())
                .ok_or_else(|| CliError::Usage(format!("repro needs an experiment: {}", repro::EXPERIMENTS.join(", "))))?;
            let out = a.common.out.clone().or_else(|| Some(PathBuf::from("runs").join(&name)));
            let mut params = Map::new();
            params.insert("experiment".into(), Value::from(name.clone()));
            (params, out, repro::run(&name)?)
        }
    })
}

fn execute(cmd: Command, stdout: &mut dyn Write) -> Result<()> {
    let name = cmd.name();
    let (params, out_dir, output) = dispatch(&cmd)?;
    let out_dir = out_dir.unwrap_or_else(|| PathBuf::from("runs").join(name));
    let mut cfg = RunConfig::new(name, params, out_dir);
    cfg.seed = cfg.seed.or(output.seed);
    let mut art = Artifacts::create(&cfg.out)?;
    for (file, contents) in &output.files {
        art.write(file, contents)?;
    }
    let manifest = art.finish(&cfg)?;

    let mut summary = Map::new();
    summary.insert("command".into(), Value::from(name));
    if let Some(Value::String(e)) = cfg.params.get("experiment") {
        summary.insert("experiment".into(), Value::from(e.clone()));
    }
    summary.insert("out".into(), Value::from(cfg.out.display().to_string()));
    summary.insert("seed".into(), cfg.seed.map_or(Value::Null, Value::from));
    summary.insert("artifacts".into(), Value::from(manifest.artifacts.keys().cloned().collect::<Vec<_>>()));
    summary.extend(output.summary);
    let line = serde_json::to_string(&summary).expect("summary serializes");
    writeln!(stdout, "{line}").map_err(|e| CliError::io("<stdout>", e))
}

fn report(e: CliError, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    e.exit_code()
}

fn parse(args: Vec<OsString>) -> std::result::Result<Cli, clap::Error> {
    let matches = Cli::command().try_get_matches_from(args)?;
    Cli::from_arg_matches(&matches)
}

/// Runs one invocation (`args[0]` is the program name) and returns the exit
/// code: 0 on success, 2 on usage or parameter errors, 1 otherwise.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    init_threads();
    let args = match config::expand(args.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => return report(e, stderr),
    };
    let cli = match parse(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => report(e, stderr),
    }
}
