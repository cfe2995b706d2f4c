//! Reproducibility record written next to every command's primary output.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    /// The invocation, argv joined by spaces.
    pub command: String,
    pub version: String,
    pub inputs: Vec<String>,
    /// Every file the command wrote, this manifest included.
    pub outputs: Vec<String>,
    pub seeds: Vec<u64>,
    pub duration_s: f64,
}

impl RunManifest {
    pub fn new(inputs: Vec<String>, seeds: Vec<u64>) -> Self {
        Self {
            command: std::env::args().collect::<Vec<_>>().join(" "),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs,
            outputs: Vec::new(),
            seeds,
            duration_s: 0.0,
        }
    }

    /// Write `<primary_output>.manifest.json` listing `primary_output`,
    /// any extra outputs, and the manifest file itself.
    pub fn write_beside(
        mut self,
        primary_output: &Path,
        started: std::time::Instant,
    ) -> Result<PathBuf, CliError> {
        let manifest_path = PathBuf::from(format!("{}.manifest.json", primary_output.display()));
        self.outputs.push(primary_output.display().to_string());
        self.outputs.push(manifest_path.display().to_string());
        self.duration_s = started.elapsed().as_secs_f64();
        let body = serde_json::to_string_pretty(&self)
            .map_err(|e| CliError::usage(format!("manifest serialization: {e}")))?;
        std::fs::write(&manifest_path, body).map_err(|e| {
            CliError::usage(format!("cannot write {}: {e}", manifest_path.display()))
        })?;
        Ok(manifest_path)
    }
}
