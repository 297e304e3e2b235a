use std::fs;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{args::Cli, commands, parse_args, runtime, write_files, CliError, EXIT_OK, EXIT_RUNTIME};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Everything needed to reproduce a run's data files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Arguments as run, with config files expanded and file inputs inlined.
    pub argv: Vec<String>,
    /// The fully resolved options, defaults included.
    pub config: serde_json::Value,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn digests(files: &[(String, Vec<u8>)]) -> Vec<OutputDigest> {
    files
        .iter()
        .map(|(p, b)| OutputDigest { path: p.clone(), sha256: sha256_hex(b), bytes: b.len() as u64 })
        .collect()
}

impl RunManifest {
    pub fn new(
        cli: &Cli,
        argv: Vec<String>,
        files: &[(String, Vec<u8>)],
        started: DateTime<Utc>,
        finished: DateTime<Utc>,
    ) -> RunManifest {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            argv,
            config: serde_json::to_value(&cli.command).unwrap_or(serde_json::Value::Null),
            started: started.to_rfc3339_opts(SecondsFormat::Millis, true),
            finished: finished.to_rfc3339_opts(SecondsFormat::Millis, true),
            outputs: digests(files),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(runtime)? + "\n";
        fs::write(path, text).map_err(|e| runtime(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<RunManifest, CliError> {
        let text = fs::read_to_string(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| runtime(format!("{}: {e}", path.display())))
    }
}

/// Drops `--out` and inlines `--map-file`, `--lsystem-file` and `--seq-file`
/// so the recorded arguments do not depend on the working directory.
pub fn normalize_argv(argv: &[String]) -> Result<Vec<String>, String> {
    const INLINE: [(&str, &str); 3] =
        [("--map-file", "--map-expr"), ("--lsystem-file", "--lsystem-text"), ("--seq-file", "--seq")];
    let mut out = Vec::with_capacity(argv.len());
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let (flag, inline_value) = match a.split_once('=') {
            Some((f, v)) if f.starts_with("--") => (f, Some(v.to_string())),
            _ => (a.as_str(), None),
        };
        let take = |it: &mut std::slice::Iter<String>| -> Result<String, String> {
            match &inline_value {
                Some(v) => Ok(v.clone()),
                None => it.next().cloned().ok_or(format!("{flag} needs a value")),
            }
        };
        if flag == "--out" {
            take(&mut it)?;
        } else if let Some((_, to)) = INLINE.iter().find(|(from, _)| *from == flag) {
            let path = take(&mut it)?;
            let text = fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
            let text = if *to == "--seq" { commands::sequence_text(&text) } else { text.trim().to_string() };
            out.push(format!("{to}={text}"));
        } else {
            out.push(a.clone());
        }
    }
    Ok(out)
}

/// Re-runs the manifest's arguments and compares every output digest.
/// Exit code 0 when all match, 2 otherwise.
pub fn replay(path: &Path, out: Option<&Path>) -> Result<i32, CliError> {
    let m = RunManifest::read(path)?;
    let cli = parse_args(&m.argv).map_err(|e| runtime(format!("manifest arguments no longer parse: {e}")))?;
    let outcome = commands::execute(&cli)?;
    if let Some(dir) = out {
        write_files(dir, &outcome.files)?;
    }
    let now = digests(&outcome.files);
    let mut same = now.len() == m.outputs.len();
    for d in &m.outputs {
        let status = match now.iter().find(|x| x.path == d.path) {
            Some(x) if x.sha256 == d.sha256 => "identical",
            Some(_) => {
                same = false;
                "DIFFERS"
            }
            None => {
                same = false;
                "MISSING"
            }
        };
        println!("{status}\t{}\t{}", d.path, d.sha256);
    }
    Ok(if same { EXIT_OK } else { EXIT_RUNTIME })
}
