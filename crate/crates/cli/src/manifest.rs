//! One manifest per invocation: the full configuration echo and the
//! artifact list needed to reproduce a run byte for byte.

use std::path::{Path, PathBuf};

use serde::Serialize;

use graphsig::Result;

pub const RUN_MANIFEST_FILE: &str = "run_manifest.json";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub toolkit_version: String,
    pub outputs: Vec<String>,
    pub duration_secs: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seeds: Vec<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            config,
            seeds,
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
            duration_secs: 0.0,
        }
    }

    pub fn record(&mut self, name: impl Into<String>) {
        self.outputs.push(name.into());
    }

    /// Writes the manifest into `dir` through a temp file and rename.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(RUN_MANIFEST_FILE);
        let body = serde_json::to_string_pretty(self).expect("manifest serializes");
        crate::commands::write_atomic(&path, body.as_bytes())?;
        Ok(path)
    }
}
