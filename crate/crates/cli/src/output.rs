//! Output conventions: locale-independent number formatting, the fixed CSV
//! schemas, and the run manifest written alongside every artifact.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Format a float with 12 significant digits, locale-independent.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.11e}")
    }
}

/// Manifest written next to every output file. Re-running the recorded
/// command (or passing the manifest itself to `sweep --config`) reproduces
/// the artifact byte for byte; only the timestamp varies between runs.
#[derive(Debug, Serialize)]
pub struct RunManifest<P: Serialize> {
    pub command: String,
    pub parameters: P,
    pub seed: Option<u64>,
    pub artifacts: Vec<PathBuf>,
    pub tool_version: String,
    pub timestamp: String,
}

impl<P: Serialize> RunManifest<P> {
    pub fn new(command: &str, parameters: P, seed: Option<u64>, artifacts: Vec<PathBuf>) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            seed,
            artifacts,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    name.push_str(".manifest.json");
    out.with_file_name(name)
}

pub fn write_manifest<P: Serialize>(out: &Path, manifest: &RunManifest<P>) -> Result<PathBuf> {
    let path = manifest_path(out);
    let body = serde_json::to_string_pretty(manifest)?;
    fs::write(&path, body + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn write_text(path: &Path, body: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}
