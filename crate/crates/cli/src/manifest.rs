use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use ivhs::detideal::sha256_hex;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Provenance record written next to the artifacts of every run.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    pub wall_time_ms: u128,
    pub exit_code: u8,
    pub error: Option<String>,
    pub artifacts: &'a [Artifact],
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes artifacts into one directory and records their hashes.
pub struct ArtifactWriter {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
}

impl ArtifactWriter {
    pub fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(ArtifactWriter {
            dir,
            artifacts: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.artifacts.push(Artifact {
            file: name.to_string(),
            bytes: contents.len(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish<C: Serialize>(
        &self,
        command: &str,
        config: &C,
        elapsed: Duration,
        exit_code: u8,
        error: Option<String>,
    ) -> Result<()> {
        let manifest = RunManifest {
            tool: "ivhs",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            wall_time_ms: elapsed.as_millis(),
            exit_code,
            error,
            artifacts: &self.artifacts,
        };
        let path = self.dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}
