//! Run-directory manifest.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;

/// Record of one CLI invocation, written as `manifest.json` in the run directory.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seeds: Vec<u64>,
    pub started_at: String,
    pub finished_at: String,
    pub artifacts: Vec<String>,
    pub version: String,
}

/// Collects artifacts while a command runs.
pub struct RunDir {
    root: PathBuf,
    command: String,
    config: Value,
    seeds: Vec<u64>,
    started_at: String,
    artifacts: Vec<String>,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl RunDir {
    pub fn create(root: &Path, command: &str, config: &impl Serialize, seeds: Vec<u64>) -> Result<Self> {
        std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            command: command.to_string(),
            // round-tripping through Value sorts object keys
            config: serde_json::to_value(config)?,
            seeds,
            started_at: now(),
            artifacts: Vec::new(),
        })
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.root.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let v = serde_json::to_value(value)?;
        let mut s = serde_json::to_string_pretty(&v)?;
        s.push('\n');
        self.write_text(name, &s)
    }

    pub fn finish(mut self) -> Result<RunManifest> {
        self.artifacts.push("manifest.json".to_string());
        let m = RunManifest {
            command: self.command,
            config: self.config,
            seeds: self.seeds,
            started_at: self.started_at,
            finished_at: now(),
            artifacts: self.artifacts,
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let mut s = serde_json::to_string_pretty(&m)?;
        s.push('\n');
        let path = self.root.join("manifest.json");
        std::fs::write(&path, s).with_context(|| format!("writing {}", path.display()))?;
        Ok(m)
    }
}
