use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ScanRow, Tag};

pub const ATLAS_CSV_HEADER: &str = "b,class,period,increment,mean_laminar,evidence";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtlasRow {
    pub b: String,
    pub class: String,
    pub period: Option<usize>,
    pub increment: Option<String>,
    pub mean_laminar: Option<String>,
    pub evidence: usize,
    pub boundary: bool,
    /// Path of the row's diagnostic JSON, relative to the atlas.
    pub diagnostics: String,
}

impl AtlasRow {
    fn from_row(k: usize, r: &ScanRow) -> AtlasRow {
        let (increment, mean_laminar) = match &r.class.tag {
            Tag::Helix { c, .. } => (Some(c.to_string()), None),
            Tag::PseudoHelix { c, mean_laminar, .. } => (Some(format!("{c:.6}")), Some(format!("{mean_laminar:.1}"))),
            _ => (None, None),
        };
        AtlasRow {
            b: r.b.to_string(),
            class: r.class.tag.kind().to_string(),
            period: r.class.tag.period(),
            increment,
            mean_laminar,
            evidence: r.class.evidence,
            boundary: r.boundary,
            diagnostics: format!("rows/row-{k:04}.json"),
        }
    }

    fn csv(&self) -> String {
        let opt = |s: &Option<String>| s.clone().unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.b,
            self.class,
            self.period.map(|p| p.to_string()).unwrap_or_default(),
            opt(&self.increment),
            opt(&self.mean_laminar),
            self.evidence
        )
    }
}

#[derive(Serialize)]
struct Atlas<'a, C: Serialize> {
    config: &'a C,
    rows: &'a [AtlasRow],
}

/// The sweep's data files as (relative path, contents): `sweep.csv`,
/// `atlas.json` and one `rows/row-NNNN.json` per sample.
pub fn atlas_files<C: Serialize>(rows: &[ScanRow], config: &C) -> serde_json::Result<Vec<(String, Vec<u8>)>> {
    let atlas: Vec<AtlasRow> = rows.iter().enumerate().map(|(k, r)| AtlasRow::from_row(k, r)).collect();
    let mut files = Vec::new();
    let mut csv = String::from(ATLAS_CSV_HEADER);
    csv.push('\n');
    for (a, r) in atlas.iter().zip(rows) {
        csv.push_str(&a.csv());
        csv.push('\n');
        files.push((a.diagnostics.clone(), (serde_json::to_string_pretty(r)? + "\n").into_bytes()));
    }
    files.push(("sweep.csv".to_string(), csv.into_bytes()));
    let json = serde_json::to_string_pretty(&Atlas { config, rows: &atlas })? + "\n";
    files.push(("atlas.json".to_string(), json.into_bytes()));
    Ok(files)
}

/// Writes [`atlas_files`] under `dir`. Returns the files written.
pub fn write_atlas<C: Serialize>(dir: &Path, rows: &[ScanRow], config: &C) -> io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (rel, bytes) in atlas_files(rows, config)? {
        let p = dir.join(rel);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&p, bytes)?;
        written.push(p);
    }
    Ok(written)
}
