use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::isogeny::{table_text, SUPPORTED_LEVELS};

/// Result of one experiment: a CSV, its JSON mirror and a short summary.
#[derive(Clone, Debug)]
pub struct Report {
    pub name: String,
    pub csv: String,
    pub json: Value,
    pub summary: Value,
    /// Additional `(file name, contents)` pairs.
    pub extra: Vec<(String, String)>,
}

impl Report {
    pub fn new(name: &str, csv: String, json: Value, summary: Value) -> Self {
        Report { name: name.to_string(), csv, json, summary, extra: vec![] }
    }

    /// Output files in write order.
    pub fn files(&self) -> Result<Vec<(String, String)>> {
        let mut json = serde_json::to_string_pretty(&self.json).map_err(|e| Error::Io(e.to_string()))?;
        json.push('\n');
        let mut out = vec![(format!("{}.csv", self.name), self.csv.clone()), (format!("{}.json", self.name), json)];
        out.extend(self.extra.iter().cloned());
        Ok(out)
    }
}

pub fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub config: Value,
    pub version: String,
    pub data_checksums: BTreeMap<String, String>,
    pub wall_time_ms: u128,
    pub status: String,
    pub exit_code: i32,
    pub error: Option<String>,
    pub outputs: Vec<String>,
    pub summary: Value,
}

/// sha256 of each modular-polynomial table as it would be loaded.
pub fn data_checksums() -> BTreeMap<String, String> {
    SUPPORTED_LEVELS
        .iter()
        .map(|&n| {
            let v = match table_text(n) {
                Ok(t) => hex::encode(Sha256::digest(t.as_bytes())),
                Err(e) => format!("unreadable: {}", e),
            };
            (format!("phi_{}.txt", n), v)
        })
        .collect()
}

pub fn write_files(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {}", dir.display(), e)))?;
    let mut out = vec![];
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::Io(format!("cannot write {}: {}", path.display(), e)))?;
        out.push(path);
    }
    Ok(out)
}

pub fn write_manifest(dir: &Path, m: &RunManifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(m).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    write_files(dir, &[("manifest.json".to_string(), text)]).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_when_needed() {
        let t = csv_table(&["n", "t0"], vec![vec!["4".into(), "a,b".into()]]).unwrap();
        assert_eq!(t, "n,t0\n4,\"a,b\"\n");
    }

    #[test]
    fn checksums_cover_every_level() {
        let c = data_checksums();
        assert_eq!(c.len(), SUPPORTED_LEVELS.len());
        assert!(c.values().all(|v| v.len() == 64));
    }
}
