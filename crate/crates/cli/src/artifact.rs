//! Run directories, manifests and certificate summaries.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";
pub const RUN_DIR_ENV: &str = "DNLS_RUN_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Certificate {
    /// Passes when `value <= threshold`.
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }

    /// A yes/no check recorded as `1` or `0` against threshold `1`.
    pub fn holds(name: &str, ok: bool) -> Self {
        Self {
            name: name.to_string(),
            value: if ok { 1.0 } else { 0.0 },
            threshold: 1.0,
            passed: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArtifact {
    pub config: RunConfig,
    pub code_version: String,
    pub wall_time_s: f64,
    pub directory: PathBuf,
    pub files: Vec<OutputFile>,
    pub certificates: Vec<Certificate>,
    pub passed: bool,
}

impl RunArtifact {
    pub fn failed_certificates(&self) -> impl Iterator<Item = &Certificate> {
        self.certificates.iter().filter(|c| !c.passed)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// An output directory that records what is written into it.
pub struct RunDir {
    path: PathBuf,
    files: Vec<OutputFile>,
}

impl RunDir {
    /// Creates `<root>/<stamp>-<command>`, adding a numeric suffix if taken.
    pub fn create(root: &Path, stamp: &str, command: &str) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root.display(), e))?;
        let base = format!("{stamp}-{command}");
        for attempt in 0.. {
            let name = if attempt == 0 {
                base.clone()
            } else {
                format!("{base}-{attempt}")
            };
            let path = root.join(name);
            match fs::create_dir(&path) {
                Ok(()) => {
                    return Ok(Self {
                        path,
                        files: Vec::new(),
                    })
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
                Err(e) => return Err(CliError::io(path.display(), e)),
            }
        }
        unreachable!()
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<(), CliError> {
        let path = self.path.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(path.display(), e))?;
        self.files.push(OutputFile {
            name: name.to_string(),
            sha256: sha256_hex(contents),
            bytes: contents.len(),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn into_files(self) -> Vec<OutputFile> {
        self.files
    }
}

pub fn write_manifest(artifact: &RunArtifact) -> Result<(), CliError> {
    let path = artifact.directory.join(MANIFEST);
    let text = serde_json::to_string_pretty(artifact).expect("serializable") + "\n";
    fs::write(&path, text).map_err(|e| CliError::io(path.display(), e))
}

/// Re-reads a manifest and checks every listed file against its hash.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>, CliError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(path.display(), e))?;
    let artifact: RunArtifact = serde_json::from_str(&text).map_err(|e| CliError::config(MANIFEST, e))?;
    let mut mismatched = Vec::new();
    for file in &artifact.files {
        match fs::read(dir.join(&file.name)) {
            Ok(bytes) if sha256_hex(&bytes) == file.sha256 => {}
            _ => mismatched.push(file.name.clone()),
        }
    }
    Ok(mismatched)
}
