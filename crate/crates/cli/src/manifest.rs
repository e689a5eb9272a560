use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// What one invocation ran: the command, its validated parameters keyed by
/// flag name, the seed if it has one, and where artifacts go.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub params: Map<String, Value>,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(command: &str, params: Map<String, Value>, out: PathBuf) -> Self {
        let seed = params.get("seed").and_then(Value::as_u64);
        Self { command: command.to_string(), params, seed, out }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub params: Map<String, Value>,
    pub seed: Option<u64>,
    /// File name to hex SHA-256.
    pub artifacts: BTreeMap<String, String>,
    pub version: String,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.display().to_string(), source })
    }
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Output directory that records a hash for every file written through it.
#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    hashes: BTreeMap<String, String>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), hashes: BTreeMap::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.hashes.insert(name.to_string(), sha256_hex(contents.as_bytes()));
        Ok(())
    }

    pub fn hashes(&self) -> &BTreeMap<String, String> {
        &self.hashes
    }

    pub fn finish(self, cfg: &RunConfig) -> Result<Manifest> {
        let manifest = Manifest {
            command: cfg.command.clone(),
            params: cfg.params.clone(),
            seed: cfg.seed,
            artifacts: self.hashes,
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let path = self.dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(manifest)
    }
}
