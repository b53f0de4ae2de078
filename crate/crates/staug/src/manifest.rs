//! Run manifests: every CLI command records its full configuration, seed, and
//! input hash so a run can be reproduced bit-exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Where the input series came from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputSpec {
    File { path: String, sha256: String },
    Synth { spec: serde_json::Value },
}

/// Snapshot of one command invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub seed: u64,
    pub input: InputSpec,
    pub config: serde_json::Value,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outputs: Option<serde_json::Value>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        seed: u64,
        input: InputSpec,
        config: serde_json::Value,
    ) -> Self {
        let config_hash = sha256_hex(config.to_string().as_bytes());
        Self {
            command: command.to_string(),
            seed,
            input,
            config,
            config_hash,
            outputs: None,
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<RunManifest> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

/// Content hash of an input file.
pub fn hash_file(path: impl AsRef<Path>) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}
