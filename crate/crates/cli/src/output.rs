//! Output files: '#'-prefixed provenance headers, fixed float formatting and
//! atomic placement.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::CliError;

/// Identifies the run that produced a file.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    fn csv_header(&self) -> String {
        format!(
            "# spincat {}\n# config_sha256: {}\n# seed: {}\n",
            self.command, self.config_sha256, self.seed
        )
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn f(x: f64) -> String {
    format!("{x:.16e}")
}

/// A file to be written once all computation has finished.
#[derive(Debug, Clone)]
pub struct OutFile {
    pub name: String,
    pub contents: String,
}

pub fn csv(prov: &Provenance, name: &str, columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> OutFile {
    let mut contents = prov.csv_header();
    contents.push_str(&columns.join(","));
    contents.push('\n');
    for row in rows {
        contents.push_str(&row.join(","));
        contents.push('\n');
    }
    OutFile { name: name.to_string(), contents }
}

/// JSON document with the provenance fields merged in at top level.
pub fn json(prov: &Provenance, name: &str, schema: &str, body: Value) -> OutFile {
    let mut doc = json!({
        "schema": schema,
        "command": prov.command,
        "config_sha256": prov.config_sha256,
        "seed": prov.seed,
    });
    if let (Some(target), Value::Object(extra)) = (doc.as_object_mut(), body) {
        target.extend(extra);
    }
    let mut contents = serde_json::to_string_pretty(&doc).expect("serializable values");
    contents.push('\n');
    OutFile { name: name.to_string(), contents }
}

/// Writes each file through a temporary sibling and renames it into place.
pub fn write_all(dir: &Path, files: &[OutFile]) -> Result<Vec<PathBuf>, CliError> {
    let io = |what: &str, e: std::io::Error| CliError::Config(format!("{what} {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(|e| io("cannot create output directory", e))?;
    let mut written = Vec::with_capacity(files.len());
    for file in files {
        let target = dir.join(&file.name);
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io("cannot write into", e))?;
        tmp.write_all(file.contents.as_bytes()).map_err(|e| io("cannot write into", e))?;
        tmp.persist(&target).map_err(|e| io("cannot rename into", e.error))?;
        written.push(target);
    }
    Ok(written)
}
