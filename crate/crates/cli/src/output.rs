//! Atomic output files and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    tool: &'a str,
    version: &'a str,
    seed: Option<u64>,
    config: &'a serde_json::Value,
    inputs: &'a [FileRecord],
    outputs: &'a [FileRecord],
    wall_time_s: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// followed by a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Output directory of one run. Every file written through it is hashed
/// into the manifest.
pub struct RunOutput {
    dir: PathBuf,
    command: String,
    started: Instant,
    inputs: Vec<FileRecord>,
    outputs: Vec<FileRecord>,
}

impl RunOutput {
    pub fn create(dir: &Path, command: &str) -> CliResult<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(RunOutput {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            started: Instant::now(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> CliResult<PathBuf> {
        let bytes = contents.as_ref();
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.outputs.retain(|r| r.path != name);
        self.outputs.push(FileRecord {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<PathBuf> {
        let mut s = serde_json::to_string_pretty(value).context("serializing JSON")?;
        s.push('\n');
        self.write(name, s)
    }

    /// Records an input file with its hash.
    pub fn input(&mut self, path: &Path) -> CliResult<()> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(FileRecord {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len(),
        });
        Ok(())
    }

    pub fn outputs(&self) -> &[FileRecord] {
        &self.outputs
    }

    /// Writes the manifest; it lists every output but not itself.
    pub fn finish(self, seed: Option<u64>, config: &serde_json::Value) -> CliResult<PathBuf> {
        let manifest = Manifest {
            command: &self.command,
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            inputs: &self.inputs,
            outputs: &self.outputs,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        let mut s = serde_json::to_string_pretty(&manifest).context("serializing manifest")?;
        s.push('\n');
        let path = self.dir.join(MANIFEST_NAME);
        write_atomic(&path, s.as_bytes())?;
        Ok(path)
    }
}
