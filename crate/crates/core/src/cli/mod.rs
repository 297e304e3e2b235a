//! Command-line front end: argument handling, config files, run manifests.
//!
//! Every command builds its data files in memory, writes them under `--out`
//! and records their digests in `manifest.json` next to them. Replaying a
//! manifest re-runs the recorded arguments and compares digests.

mod args;
mod commands;
mod config;
mod manifest;

pub use args::Cli;
pub use config::{expand_config, parse_config};
pub use manifest::{OutputDigest, RunManifest};

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, FromArgMatches};

/// Output directory when `--out` is not given.
pub const DEFAULT_OUT: &str = "helixlab-out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

pub(crate) fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub(crate) fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// What a command produced.
pub struct Outcome {
    /// Data files, relative to the output directory.
    pub files: Vec<(String, Vec<u8>)>,
    pub stdout: String,
    /// Nonzero when the data records a runtime failure (e.g. a pole hit).
    pub code: i32,
}

/// Parses argv (config already expanded) into the command line.
pub fn parse_args(argv: &[String]) -> Result<Cli, clap::Error> {
    let mut cmd = Cli::command().args_override_self(true);
    let names: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
    for n in names {
        cmd = cmd.mut_subcommand(n, |s| s.args_override_self(true));
    }
    let m = cmd.try_get_matches_from(argv)?;
    Cli::from_arg_matches(&m)
}

fn write_files(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<(), CliError> {
    for (rel, bytes) in files {
        let p = dir.join(rel);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).map_err(|e| runtime(format!("{}: {e}", parent.display())))?;
        }
        fs::write(&p, bytes).map_err(|e| runtime(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<String> = args.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    match run_inner(&argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn run_inner(argv: &[String]) -> Result<i32, CliError> {
    let expanded = expand_config(argv).map_err(usage)?;
    let cli = match parse_args(&expanded) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return Ok(match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            });
        }
    };
    if let args::Command::Replay(r) = &cli.command {
        return manifest::replay(Path::new(&r.manifest), cli.out.as_deref().map(Path::new));
    }
    let recorded = manifest::normalize_argv(&expanded).map_err(usage)?;
    let started = chrono::Utc::now();
    let out = commands::execute(&cli)?;
    let finished = chrono::Utc::now();
    let dir = PathBuf::from(cli.out.as_deref().unwrap_or(DEFAULT_OUT));
    fs::create_dir_all(&dir).map_err(|e| runtime(format!("{}: {e}", dir.display())))?;
    write_files(&dir, &out.files)?;
    let m = RunManifest::new(&cli, recorded, &out.files, started, finished);
    m.write(&dir.join(manifest::MANIFEST_NAME))?;
    print!("{}", out.stdout);
    Ok(out.code)
}
