//! Output directory, result files and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

fn hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Collects written files so the manifest can list their digests.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<(String, String)>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::Io(format!("{}: {e}", root.display())))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.written.push((name.to_string(), hex(bytes)));
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text =
            serde_json::to_string_pretty(value).map_err(|e| CliError::Numeric(e.to_string()))?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    /// Writes `manifest.json`: effective config and its digest, seed, tolerances and output digests.
    pub fn finish(
        mut self,
        command: &str,
        config: &RunConfig,
        seed: u64,
        tolerances: Value,
    ) -> Result<PathBuf, CliError> {
        let config_json =
            serde_json::to_value(config).map_err(|e| CliError::Numeric(e.to_string()))?;
        let canonical =
            serde_json::to_string(&config_json).map_err(|e| CliError::Numeric(e.to_string()))?;
        let outputs: Vec<Value> = self
            .written
            .iter()
            .map(|(f, h)| json!({ "file": f, "sha256": h }))
            .collect();
        let manifest = json!({
            "tool": "cvs-sim",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "seed": seed,
            "config": config_json,
            "config_sha256": hex(canonical.as_bytes()),
            "tolerances": tolerances,
            "outputs": outputs,
        });
        self.write_json("manifest.json", &manifest)
    }
}
