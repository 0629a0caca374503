use std::fmt::Write as _;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use super::fit::RateFitResult;
use super::run::TrialRecord;
use crate::conditions::DesignDiagnostics;
use crate::error::{Error, Result};

/// Fixed column order of record CSV files.
pub const RECORD_CSV_HEADER: &str = "n,d,trial,seed,loss_l2,loss_pred,objective_ok,wall_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Pick the format from a file extension, defaulting to JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHeader {
    pub config_hash: String,
    pub seed_root: u64,
}

impl FileHeader {
    fn comment(&self) -> String {
        format!("# config_hash={},seed_root={}\n", self.config_hash, self.seed_root)
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Artifact<'a> {
    Records(&'a [TrialRecord]),
    Diagnostics(&'a DesignDiagnostics),
    Fit(&'a RateFitResult),
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    header: FileHeader,
    data: T,
}

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn records_csv(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    out.push_str(RECORD_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{:?}",
            r.n,
            r.d,
            r.trial,
            r.seed,
            num(r.loss("l2")),
            num(r.loss("pred")),
            r.objective_ok,
            r.wall_ms
        );
    }
    out
}

fn key_value_csv<T: Serialize>(value: &T) -> Result<String> {
    let json = serde_json::to_value(value)?;
    let mut out = String::from("key,value\n");
    flatten("", &json, &mut out);
    Ok(out)
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut String) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        other => {
            let _ = writeln!(out, "{prefix},{other}");
        }
    }
}

/// Write an artifact with a header naming the config hash and seed root.
///
/// CSV files start with a `# config_hash=...,seed_root=...` comment line;
/// records use [`RECORD_CSV_HEADER`], other artifacts a `key,value` listing.
/// JSON files hold `{"header": {...}, "data": ...}`.
pub fn persist(artifact: Artifact<'_>, header: &FileHeader, path: &Path, format: Format) -> Result<()> {
    let text = match format {
        Format::Csv => {
            let body = match artifact {
                Artifact::Records(r) => records_csv(r),
                Artifact::Diagnostics(d) => key_value_csv(d)?,
                Artifact::Fit(f) => key_value_csv(f)?,
            };
            header.comment() + &body
        }
        Format::Json => {
            let header = header.clone();
            match artifact {
                Artifact::Records(r) => serde_json::to_string_pretty(&Envelope { header, data: r })?,
                Artifact::Diagnostics(d) => serde_json::to_string_pretty(&Envelope { header, data: d })?,
                Artifact::Fit(f) => serde_json::to_string_pretty(&Envelope { header, data: f })?,
            }
        }
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Read back a JSON artifact written by [`persist`].
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<(FileHeader, T)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let env: Envelope<T> = serde_json::from_str(&text)?;
    Ok((env.header, env.data))
}
